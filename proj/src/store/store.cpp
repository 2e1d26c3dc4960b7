#include "nim/store/store.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

#include "nim/meta/ops.hpp"
#include "nim/meta/serialize.hpp"

namespace nim::store {

using nlohmann::json;

namespace {

bool valid_instance_id(const std::string& id) {
    if (id.empty() || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == ':';
    });
}

std::string category_name_of(const std::string& qualifiedType) {
    auto dot = qualifiedType.rfind('.');
    std::string simple = dot == std::string::npos ? qualifiedType : qualifiedType.substr(dot + 1);
    std::transform(simple.begin(), simple.end(), simple.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return simple;
}

template <typename F>
void for_each_category(meta::Category& c, F&& f) {
    f(c);
    for (auto& child : c.children)
        if (child.is_category()) for_each_category(child.category(), f);
}

template <typename F>
void for_each_entry(meta::Category& c, F&& f) {
    for (auto& child : c.children) {
        if (child.is_category())
            for_each_entry(child.category(), f);
        else
            f(child.entry());
    }
}

} // namespace

Store::Store(StoreConfig config) : config_(std::move(config)) {
    if (config_.nodeLocation.empty()) throw NimError(ErrorCode::Invalid, "store node location must not be empty");
    if (!config_.clock) config_.clock = system_clock();
    if (!config_.dataDir.empty()) {
        std::filesystem::create_directories(config_.dataDir);
        replay_journal();
        journal_ = JournalWriter(config_.dataDir / kJournalFile);
    }
}

void Store::replay_journal() {
    const auto path = config_.dataDir / kJournalFile;
    if (!std::filesystem::exists(path)) return;
    JournalReadResult read = read_journal(path);
    replay_.warning = read.warning;
    std::uintmax_t keep = read.validBytes;
    for (std::size_t i = 0; i < read.records.size(); ++i) {
        try {
            apply(read.records[i]);
            ++replay_.records;
        } catch (const std::exception& e) {
            replay_.warning = "journal record seq " + std::to_string(read.records[i].seq) +
                              " (line " + std::to_string(i + 1) + ") could not be applied: " + e.what();
            keep = i == 0 ? 0 : read.endOffsets[i - 1];
            break;
        }
    }
    if (keep < std::filesystem::file_size(path)) std::filesystem::resize_file(path, keep);
}

void Store::commit(RecordKind kind, json payload) {
    JournalRecord rec{journalSeq_ + 1, kind, std::move(payload)};
    if (journal_.is_open()) journal_.append(rec);
    apply(rec);
}

void Store::apply(const JournalRecord& record) {
    const json& p = record.payload;
    switch (record.kind) {
    case RecordKind::ModelRegistered: {
        StoredModel m;
        m.modelId = p.at("modelId").get<std::string>();
        m.source = p.at("source").get<std::string>();
        m.types = p.at("types").get<std::vector<std::string>>();
        m.registeredAt = from_millis(p.at("registeredAt").get<std::int64_t>());
        types_.insert(m.types.begin(), m.types.end());
        models_.push_back(std::move(m));
        break;
    }
    case RecordKind::InstanceCreated: apply_instance(p); break;
    case RecordKind::ValueAppended: {
        const auto path = p.at("path").get<std::vector<std::string>>();
        meta::Entry* e = find_entry(p.at("instanceId").get<std::string>(), path);
        if (!e) throw NimError(ErrorCode::Corrupt, "value for unknown entry");
        meta::TimedValue v = meta::value_from_json(p.at("value"), e->valueKind);
        ingestSeq_ = std::max(ingestSeq_, v.ingestSeq);
        e->insert(std::move(v));
        break;
    }
    case RecordKind::ForecastAdded: {
        const auto path = p.at("path").get<std::vector<std::string>>();
        meta::Entry* e = find_entry(p.at("instanceId").get<std::string>(), path);
        if (!e) throw NimError(ErrorCode::Corrupt, "forecast for unknown entry");
        e->forecasts.push_back(meta::forecast_from_json(p.at("forecast"), e->valueKind));
        break;
    }
    case RecordKind::Purged: {
        const Instant now = from_millis(p.at("now").get<std::int64_t>());
        for (auto& root : roots_)
            for_each_entry(root, [&](meta::Entry& e) {
                std::erase_if(e.values, [&](const meta::TimedValue& v) { return v.expired_at(now); });
            });
        break;
    }
    }
    journalSeq_ = record.seq;
}

void Store::apply_instance(const json& payload) {
    meta::Category root = meta::category_from_json(payload.at("category"));
    for_each_category(root, [&](meta::Category& c) {
        if (!c.instanceId.empty() && index_.count(c.instanceId))
            throw NimError(ErrorCode::Corrupt, "duplicate instance id " + c.instanceId);
        for_each_entry(c, [&](meta::Entry& e) {
            for (const auto& v : e.values) ingestSeq_ = std::max(ingestSeq_, v.ingestSeq);
        });
    });
    idCounter_ = std::max(idCounter_, payload.at("idCounter").get<std::uint64_t>());
    roots_.push_back(std::move(root));
    std::vector<std::size_t> path;
    index_tree(roots_.back(), roots_.size() - 1, path);
}

void Store::index_tree(const meta::Category& c, std::size_t root, std::vector<std::size_t>& path) {
    if (!c.instanceId.empty()) index_.emplace(c.instanceId, Location{root, path});
    for (std::size_t i = 0; i < c.children.size(); ++i) {
        if (!c.children[i].is_category()) continue;
        path.push_back(i);
        index_tree(c.children[i].category(), root, path);
        path.pop_back();
    }
}

meta::Category* Store::find_category(const std::string& instanceId) {
    auto it = index_.find(instanceId);
    if (it == index_.end()) return nullptr;
    meta::Category* c = &roots_[it->second.root];
    for (std::size_t i : it->second.path) c = &c->children[i].category();
    return c;
}

const meta::Category* Store::find_category(const std::string& instanceId) const {
    return const_cast<Store*>(this)->find_category(instanceId);
}

meta::Entry* Store::find_entry(const std::string& instanceId, std::span<const std::string> entryPath) {
    meta::Category* c = find_category(instanceId);
    if (!c || entryPath.empty()) return nullptr;
    for (std::size_t i = 0; i + 1 < entryPath.size(); ++i) {
        c = c->find_category(entryPath[i]);
        if (!c) return nullptr;
    }
    return c->find_entry(entryPath.back());
}

const meta::Entry* Store::find_entry(const std::string& instanceId, std::span<const std::string> entryPath) const {
    return const_cast<Store*>(this)->find_entry(instanceId, entryPath);
}

void Store::record_model(const std::string& modelId, const std::string& source, const std::vector<std::string>& types,
                         Instant registeredAt) {
    std::unique_lock lock(mutex_);
    commit(RecordKind::ModelRegistered,
           {{"modelId", modelId}, {"source", source}, {"types", types}, {"registeredAt", to_millis(registeredAt)}});
}

std::vector<StoredModel> Store::models() const {
    std::shared_lock lock(mutex_);
    return models_;
}

bool Store::knows_type(const std::string& qualifiedName) const {
    std::shared_lock lock(mutex_);
    return types_.count(qualifiedName) > 0;
}

std::string Store::next_instance_id() {
    std::string id;
    do {
        id = "i-" + std::to_string(++idCounter_);
    } while (index_.count(id));
    return id;
}

void Store::check_initial_values(const meta::Category& c) const {
    meta::walk(
        c, [](const meta::Category&) {},
        [&](const meta::Entry& e) {
            if (e.range && e.valueKind != ValueKind::Number)
                throw NimError(ErrorCode::Invalid, "entry '" + e.name + "' has a range but is not a Number entry");
            if (e.range && e.range->lower > e.range->upper)
                throw NimError(ErrorCode::Invalid, "entry '" + e.name + "' has lower bound above upper bound");
            if (e.values.empty()) return;
            if (meta::check_storage_location(e.policy, config_.nodeLocation) == meta::Decision::Deny)
                throw NimError(ErrorCode::Forbidden, "entry '" + e.name + "' may not be stored at location '" +
                                                         config_.nodeLocation + "'");
            for (const auto& v : e.values) {
                if (meta::validate_range(e, v.value) == meta::RangeCheck::Violation)
                    throw NimError(ErrorCode::OutOfRange, "value " + to_string(v.value) + " of entry '" + e.name +
                                                              "' is outside its range");
                if (v.expiry && *v.expiry < v.timestamp)
                    throw NimError(ErrorCode::Invalid, "expiry precedes timestamp in entry '" + e.name + "'");
            }
        });
}

std::string Store::create_instance(meta::Category root) {
    std::unique_lock lock(mutex_);
    if (!root.sourceType.empty() && !types_.count(root.sourceType))
        throw NimError(ErrorCode::NotFound, "unknown type '" + root.sourceType + "'");

    const auto savedCounter = idCounter_;
    std::set<std::string> ids;
    std::uint64_t seq = ingestSeq_;
    try {
        bool isRoot = true;
        for_each_category(root, [&](meta::Category& c) {
            if (c.instanceId.empty() && (isRoot || !c.sourceType.empty())) {
                do {
                    c.instanceId = next_instance_id();
                } while (ids.count(c.instanceId));
            } else if (!c.instanceId.empty()) {
                if (!valid_instance_id(c.instanceId))
                    throw NimError(ErrorCode::Invalid, "malformed instance id '" + c.instanceId + "'");
                if (index_.count(c.instanceId) || ids.count(c.instanceId))
                    throw NimError(ErrorCode::Conflict, "instance id '" + c.instanceId + "' is already in use");
            }
            if (!c.instanceId.empty()) ids.insert(c.instanceId);
            isRoot = false;
        });
        for_each_entry(root, [&](meta::Entry& e) {
            for (auto& v : e.values) {
                v.ingestSeq = ++seq;
                if (!v.expiry && e.policy.defaultExpiry) v.expiry = v.timestamp + *e.policy.defaultExpiry;
            }
            std::sort(e.values.begin(), e.values.end(), [](const meta::TimedValue& a, const meta::TimedValue& b) {
                return std::tie(a.timestamp, a.ingestSeq) < std::tie(b.timestamp, b.ingestSeq);
            });
        });
        check_initial_values(root);
    } catch (...) {
        idCounter_ = savedCounter;
        throw;
    }

    const std::string id = root.instanceId;
    try {
        commit(RecordKind::InstanceCreated, {{"category", meta::category_to_json(root)}, {"idCounter", idCounter_}});
    } catch (...) {
        idCounter_ = savedCounter;
        throw;
    }
    return id;
}

AppendOutcome Store::append_value(const std::string& instanceId, std::span<const std::string> entryPath,
                                  const Scalar& value, std::optional<Instant> timestamp, std::optional<Instant> expiry) {
    std::unique_lock lock(mutex_);
    const meta::Entry* e = find_entry(instanceId, entryPath);
    if (!e) {
        if (!find_category(instanceId)) throw NimError(ErrorCode::NotFound, "unknown instance '" + instanceId + "'");
        throw NimError(ErrorCode::NotFound, "instance '" + instanceId + "' has no such entry");
    }
    if (value.kind() != e->valueKind)
        throw NimError(ErrorCode::Invalid, "entry '" + e->name + "' holds " + std::string(kind_name(e->valueKind)) +
                                               " values, got " + std::string(kind_name(value.kind())));

    const Instant ts = timestamp.value_or(config_.clock());
    AppendOutcome out;
    if (auto cur = meta::current_value(*e, ts); cur && cur->value == value) {
        out.status = AppendStatus::Deduplicated;
        out.value = cur;
        return out;
    }
    if (meta::validate_range(*e, value) == meta::RangeCheck::Violation) {
        out.status = AppendStatus::Rejected;
        out.reason = RejectReason::Range;
        out.message = "value " + to_string(value) + " is outside [" + std::to_string(e->range->lower) + ", " +
                      std::to_string(e->range->upper) + "]";
        return out;
    }
    if (meta::check_storage_location(e->policy, config_.nodeLocation) == meta::Decision::Deny) {
        out.status = AppendStatus::Rejected;
        out.reason = RejectReason::StorageLocation;
        out.message = "entry may not be stored at location '" + config_.nodeLocation + "'";
        return out;
    }
    if (!expiry && e->policy.defaultExpiry) expiry = ts + *e->policy.defaultExpiry;
    if (expiry && *expiry < ts) throw NimError(ErrorCode::Invalid, "expiry precedes timestamp");

    meta::TimedValue v{value, ts, expiry, ingestSeq_ + 1};
    json path = json::array();
    for (const auto& p : entryPath) path.push_back(p);
    commit(RecordKind::ValueAppended, {{"instanceId", instanceId}, {"path", path}, {"value", meta::value_to_json(v)}});
    out.value = v;
    return out;
}

meta::Forecast Store::add_forecast(const std::string& instanceId, std::span<const std::string> entryPath,
                                   const std::string& sourceId, std::vector<meta::ForecastPoint> points) {
    std::unique_lock lock(mutex_);
    const meta::Entry* e = find_entry(instanceId, entryPath);
    if (!e) throw NimError(ErrorCode::NotFound, "unknown instance or entry '" + instanceId + "'");
    meta::Forecast f{sourceId, std::move(points), config_.clock()};
    meta::validate_forecast(f, e->valueKind);
    json path = json::array();
    for (const auto& p : entryPath) path.push_back(p);
    commit(RecordKind::ForecastAdded,
           {{"instanceId", instanceId}, {"path", path}, {"forecast", meta::forecast_to_json(f)}});
    return f;
}

meta::Category Store::visible_copy(const meta::Category& c, std::span<const std::string> principals, Instant at) {
    meta::Category out;
    out.name = c.name;
    out.references = c.references;
    out.instanceId = c.instanceId;
    out.sourceType = c.sourceType;
    for (const auto& child : c.children) {
        if (child.is_category()) {
            out.children.emplace_back(visible_copy(child.category(), principals, at));
            continue;
        }
        const meta::Entry& e = child.entry();
        if (meta::check_access(e.policy, principals) == meta::Decision::Deny) continue;
        meta::Entry copy = e;
        std::erase_if(copy.values, [&](const meta::TimedValue& v) { return v.expired_at(at); });
        out.children.emplace_back(std::move(copy));
    }
    return out;
}

std::vector<meta::Category> Store::query(const std::string& typeOrCategory, std::span<const std::string> principals,
                                         std::optional<Instant> at) const {
    std::shared_lock lock(mutex_);
    const Instant when = at.value_or(config_.clock());
    std::vector<meta::Category> out;
    if (types_.count(typeOrCategory)) {
        for (const auto& root : roots_)
            meta::walk(
                root,
                [&](const meta::Category& c) {
                    if (c.sourceType == typeOrCategory) out.push_back(visible_copy(c, principals, when));
                },
                [](const meta::Entry&) {});
        return out;
    }
    const bool knownCategory = std::any_of(types_.begin(), types_.end(), [&](const std::string& t) {
        return category_name_of(t) == typeOrCategory;
    });
    if (!knownCategory) throw NimError(ErrorCode::NotFound, "unknown type or category '" + typeOrCategory + "'");
    for (const auto& root : roots_)
        if (root.name == typeOrCategory) out.push_back(visible_copy(root, principals, when));
    return out;
}

std::optional<meta::Category> Store::get_instance(const std::string& instanceId,
                                                  std::span<const std::string> principals,
                                                  std::optional<Instant> at) const {
    std::shared_lock lock(mutex_);
    const meta::Category* c = find_category(instanceId);
    if (!c) return std::nullopt;
    return visible_copy(*c, principals, at.value_or(config_.clock()));
}

std::vector<meta::Category> Store::all_instances(std::span<const std::string> principals,
                                                std::optional<Instant> at) const {
    std::shared_lock lock(mutex_);
    const Instant when = at.value_or(config_.clock());
    std::vector<meta::Category> out;
    for (const auto& root : roots_) out.push_back(visible_copy(root, principals, when));
    return out;
}

std::optional<meta::TimedValue> Store::current_value(const std::string& instanceId,
                                                    std::span<const std::string> entryPath,
                                                    std::span<const std::string> principals,
                                                    std::optional<Instant> at) const {
    std::shared_lock lock(mutex_);
    const meta::Entry* e = find_entry(instanceId, entryPath);
    if (!e) throw NimError(ErrorCode::NotFound, "unknown instance or entry '" + instanceId + "'");
    if (meta::check_access(e->policy, principals) == meta::Decision::Deny)
        throw NimError(ErrorCode::Forbidden, "entry '" + e->name + "' is not readable by the given principals");
    return meta::current_value(*e, at.value_or(config_.clock()));
}

EntryView Store::read_entry(const std::string& instanceId, std::span<const std::string> entryPath) const {
    std::shared_lock lock(mutex_);
    const meta::Category* c = find_category(instanceId);
    if (!c) throw NimError(ErrorCode::NotFound, "unknown instance '" + instanceId + "'");
    const meta::Entry* e = find_entry(instanceId, entryPath);
    if (!e) throw NimError(ErrorCode::NotFound, "instance '" + instanceId + "' has no such entry");
    return {*e, c->sourceType, instanceId};
}

std::size_t Store::purge_expired(Instant now) {
    std::unique_lock lock(mutex_);
    std::size_t count = 0;
    for (auto& root : roots_)
        for_each_entry(root, [&](meta::Entry& e) {
            count += static_cast<std::size_t>(std::count_if(e.values.begin(), e.values.end(),
                                                            [&](const meta::TimedValue& v) { return v.expired_at(now); }));
        });
    commit(RecordKind::Purged, {{"now", to_millis(now)}, {"deleted", count}});
    return count;
}

json Store::snapshot() const {
    std::shared_lock lock(mutex_);
    json models = json::array();
    for (const auto& m : models_)
        models.push_back({{"modelId", m.modelId},
                          {"source", m.source},
                          {"types", m.types},
                          {"registeredAt", to_millis(m.registeredAt)}});
    json instances = json::array();
    for (const auto& r : roots_) instances.push_back(meta::category_to_json(r));
    return {{"models", std::move(models)},
            {"instances", std::move(instances)},
            {"journalSeq", journalSeq_},
            {"ingestSeq", ingestSeq_},
            {"idCounter", idCounter_}};
}

std::size_t Store::instance_count() const {
    std::shared_lock lock(mutex_);
    return roots_.size();
}

} // namespace nim::store
