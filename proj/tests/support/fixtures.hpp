#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "nim/builtin/builtins.hpp"
#include "nim/service/registry.hpp"
#include "nim/service/service.hpp"
#include "nim/store/store.hpp"

namespace nimtest {

inline constexpr const char* kRoomNdf = "Room {\n  String roomName;\n}\n";
inline constexpr const char* kAnotherRoomNdf = "AnotherRoom {\n  String roomID;\n  Number surface;\n}\n";
inline constexpr const char* kStandardRoomNdf =
    "StandardRoom {\n  String identifier;\n}\n"
    "StandardRoom.identifier := Room.roomName |\n  AnotherRoom.roomID;\n";

/// Settable clock shared by copies.
class ManualClock {
public:
    explicit ManualClock(std::int64_t ms = 1'700'000'000'000) : ms_(std::make_shared<std::atomic<std::int64_t>>(ms)) {}
    nim::Clock fn() const {
        auto p = ms_;
        return [p] { return nim::from_millis(p->load()); };
    }
    void set(std::int64_t ms) { ms_->store(ms); }
    void advance(std::int64_t ms) { ms_->fetch_add(ms); }
    nim::Instant now() const { return nim::from_millis(ms_->load()); }

private:
    std::shared_ptr<std::atomic<std::int64_t>> ms_;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("nim-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Store + registry + service wired together in memory (or on `dataDir`).
struct Harness {
    ManualClock clock;
    nim::store::Store store;
    nim::service::ModelRegistry registry;
    nim::service::NimService service;

    explicit Harness(std::filesystem::path dataDir = {}, std::string location = "local", ManualClock c = ManualClock())
        : clock(c), store(config(dataDir, location, c)), registry(store), service(store, registry) {}

    static nim::store::StoreConfig config(const std::filesystem::path& dir, const std::string& location,
                                          const ManualClock& c) {
        nim::store::StoreConfig cfg;
        cfg.dataDir = dir;
        cfg.nodeLocation = location;
        cfg.clock = c.fn();
        return cfg;
    }

    std::string must_register(const std::string& src) {
        auto r = registry.register_model(src);
        if (!r.accepted()) {
            std::string msg = "registration failed:";
            for (const auto& d : r.diagnostics) msg += " " + d.str();
            throw std::runtime_error(msg);
        }
        return *r.modelId;
    }
};

/// A neighbourhood document with one instance of every nested type and a
/// grid connection between the building and the vehicle.
inline nlohmann::json full_neighbourhood_doc(const std::string& prefix = "") {
    using nlohmann::json;
    auto energy = [](double c) {
        return json::array({{{"consumption", c}, {"production", 0}, {"measuredAt", "2024-05-01T12:00:00.000Z"}}});
    };
    return {
        {"name", "Lindenhof"},
        {"district", "North"},
        {"Traffic", {{{"roadSegment", "A1"}, {"vehicleCount", 120}, {"observedAt", "2024-05-01T08:00:00.000Z"}}}},
        {"Persons", {{{"residents", 340}, {"occupancy", 0.8}}}},
        {"Reports", {{{"title", "Q1"}, {"author", "ops"}, {"issuedAt", "2024-04-01T00:00:00.000Z"}}}},
        {"GeoInfo", {{{"latitude", 51.3}, {"longitude", 9.4}, {"area", 2.5}}}},
        {"EnergyGridConnection",
         {{{"carrier", "electricity"},
           {"capacity", 400},
           {"Link", {{{"elementId", prefix + "b1"}}, {{"elementId", prefix + "ev1"}}}}}}},
        {"ParkingSpace", {{{"name", "P1"}, {"capacity", 20}, {"chargingPoint", true}}}},
        {"PublicLighting", {{{"$id", prefix + "pl1"}, {"kind", "lighting"}, {"name", "Lamp row"}, {"EnergyData", energy(3)}}}},
        {"Building",
         {{{"$id", prefix + "b1"}, {"kind", "building"}, {"name", "Hall"}, {"floorArea", 900}, {"EnergyData", energy(50)}}}},
        {"TechnicalSystem", {{{"$id", prefix + "ts1"}, {"kind", "heat pump"}, {"name", "HP"}, {"EnergyData", energy(12)}}}},
        {"ElectricVehicle",
         {{{"$id", prefix + "ev1"}, {"kind", "vehicle"}, {"name", "Van"}, {"batteryCapacity", 75}, {"EnergyData", energy(8)}}}},
    };
}

} // namespace nimtest
