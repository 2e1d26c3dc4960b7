#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "nim/meta/model.hpp"
#include "nim/store/journal.hpp"

namespace nim::store {

struct StoreConfig {
    std::string nodeLocation = "local";
    std::filesystem::path dataDir; // empty: in-memory only, no journal
    Clock clock = system_clock();
};

/// A model source as persisted by the registry.
struct StoredModel {
    std::string modelId;
    std::string source;
    std::vector<std::string> types; // qualified names it declares
    Instant registeredAt;
};

enum class AppendStatus { Stored, Deduplicated, Rejected };
enum class RejectReason { None, Range, StorageLocation };

struct AppendOutcome {
    AppendStatus status = AppendStatus::Stored;
    RejectReason reason = RejectReason::None;
    std::string message;
    std::optional<meta::TimedValue> value; // what was stored
};

struct ReplayReport {
    std::size_t records = 0;
    std::optional<std::string> warning;
};

/// Entry copy handed to readers, with the owning category's type.
struct EntryView {
    meta::Entry entry;
    std::string sourceType;
    std::string instanceId;
};

/// Persistent repository of generic-model instances.
///
/// Every mutation is turned into a journal payload, written to
/// `<dataDir>/nim.journal`, and only then applied; replay runs the same apply
/// path, so the state is a pure function of the journal bytes. Writers are
/// serialized; readers take a shared lock and receive copies.
class Store {
public:
    static constexpr const char* kJournalFile = "nim.journal";

    /// Opens the store, replaying the journal under `dataDir` when present.
    /// A corrupt tail is dropped (and truncated from the file) with a warning.
    explicit Store(StoreConfig config);

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    const StoreConfig& config() const { return config_; }
    const ReplayReport& replay_report() const { return replay_; }
    Instant now() const { return config_.clock(); }

    void record_model(const std::string& modelId, const std::string& source, const std::vector<std::string>& types,
                      Instant registeredAt);
    std::vector<StoredModel> models() const;
    bool knows_type(const std::string& qualifiedName) const;

    /// Stores a new instance tree. Categories without an instance id receive a
    /// generated one; supplied ids must be unused. Initial values go through
    /// the same kind/range/location checks as appends. Returns the root id.
    std::string create_instance(meta::Category root);

    /// Change-only ingestion: a value equal to the entry's current value at
    /// the new timestamp is not stored. `timestamp` defaults to the clock;
    /// `expiry` defaults to timestamp + policy.defaultExpiry.
    /// Throws NimError for unknown instance/entry (NotFound) or kind mismatch (Invalid).
    AppendOutcome append_value(const std::string& instanceId, std::span<const std::string> entryPath,
                               const Scalar& value, std::optional<Instant> timestamp = std::nullopt,
                               std::optional<Instant> expiry = std::nullopt);

    /// Appends a forecast (never replaces earlier ones from the same source).
    /// Throws NimError(Invalid) on empty / non-monotone points.
    meta::Forecast add_forecast(const std::string& instanceId, std::span<const std::string> entryPath,
                                const std::string& sourceId, std::vector<meta::ForecastPoint> points);

    /// Instances (root or nested) of a qualified type, or root categories with
    /// that name, in ingest order. Entries the principals may not read are
    /// omitted; values expired at `at` are omitted.
    std::vector<meta::Category> query(const std::string& typeOrCategory, std::span<const std::string> principals,
                                      std::optional<Instant> at = std::nullopt) const;

    std::optional<meta::Category> get_instance(const std::string& instanceId, std::span<const std::string> principals,
                                               std::optional<Instant> at = std::nullopt) const;

    /// Every root category, filtered as in query().
    std::vector<meta::Category> all_instances(std::span<const std::string> principals,
                                              std::optional<Instant> at = std::nullopt) const;

    /// Current value of one entry without copying its history. Throws
    /// NimError(NotFound) for an unknown entry, NimError(Forbidden) when the
    /// principals may not read it.
    std::optional<meta::TimedValue> current_value(const std::string& instanceId, std::span<const std::string> entryPath,
                                                  std::span<const std::string> principals,
                                                  std::optional<Instant> at = std::nullopt) const;

    /// Unfiltered copy of one entry. Throws NimError(NotFound).
    EntryView read_entry(const std::string& instanceId, std::span<const std::string> entryPath) const;

    /// Physically removes values with expiry <= now; returns how many.
    std::size_t purge_expired(Instant now);

    /// Whole state in canonical JSON; equal states give equal dumps.
    nlohmann::json snapshot() const;
    std::string canonical() const { return snapshot().dump(); }

    std::size_t instance_count() const;

    /// Filters a category the way query() does.
    static meta::Category visible_copy(const meta::Category& c, std::span<const std::string> principals, Instant at);

private:
    struct Location {
        std::size_t root = 0;
        std::vector<std::size_t> path; // child indexes from the root
    };

    void replay_journal();
    void commit(RecordKind kind, nlohmann::json payload);
    void apply(const JournalRecord& record);
    void apply_instance(const nlohmann::json& payload);
    void index_tree(const meta::Category& c, std::size_t root, std::vector<std::size_t>& path);

    meta::Category* find_category(const std::string& instanceId);
    const meta::Category* find_category(const std::string& instanceId) const;
    meta::Entry* find_entry(const std::string& instanceId, std::span<const std::string> entryPath);
    const meta::Entry* find_entry(const std::string& instanceId, std::span<const std::string> entryPath) const;

    std::string next_instance_id();
    void check_initial_values(const meta::Category& c) const;

    StoreConfig config_;
    ReplayReport replay_;
    JournalWriter journal_;

    mutable std::shared_mutex mutex_;
    std::vector<StoredModel> models_;
    std::set<std::string> types_;
    std::vector<meta::Category> roots_;
    std::unordered_map<std::string, Location> index_;
    std::uint64_t journalSeq_ = 0;
    std::uint64_t ingestSeq_ = 0;
    std::uint64_t idCounter_ = 0;
};

} // namespace nim::store
