#pragma once

#include <map>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "generators.hpp"

namespace nimtest {

/// Drives a store and registry with a reproducible mix of operations:
/// model registrations, instance ingests, value appends, forecasts and
/// purges. Rejected operations are part of the mix.
class Workload {
public:
    Workload(nim::store::Store& store, nim::service::ModelRegistry& registry, ManualClock clock, std::uint64_t seed);

    void step();
    int steps() const { return steps_; }

private:
    void register_model();
    void ingest();
    void append();
    void forecast();
    void remember(const nim::meta::Category& c);

    nim::store::Store& store_;
    nim::service::ModelRegistry& registry_;
    ManualClock clock_;
    Rng rng_;
    int steps_ = 0;
    int packages_ = 0;
    int ids_ = 0;
    std::vector<std::pair<std::string, std::string>> entries_; // (instance id, entry name)
};

} // namespace nimtest

namespace nimtest {

/// Up to five registered source types and one virtual target type mapped
/// from them with "|", populated with random instances, policies and
/// expiring values. Some sources cover only part of the target.
struct MappingWorld {
    Harness h;
    std::string target = "Standard";
    std::vector<std::string> targetFields = {"id", "size"};
    std::vector<std::string> sources; // registration order
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> rules; // target field -> alternatives
    std::string ndf;                  // the target model's text

    MappingWorld(Rng& rng, int maxInstances);

    std::vector<nim::transform::ConcreteInstance> oracle(const std::vector<std::string>& principals,
                                                         nim::Instant at) const;
};

} // namespace nimtest
