#include "nim/meta/serialize.hpp"

namespace nim::meta {

using nlohmann::json;

namespace {

json instant(Instant t) { return to_millis(t); }
Instant instant(const json& j) { return from_millis(j.get<std::int64_t>()); }

Scalar scalar(const json& j, ValueKind kind) {
    auto s = scalar_from_json(j, kind);
    if (!s) throw NimError(ErrorCode::Corrupt, "value " + j.dump() + " is not " + std::string(kind_name(kind)));
    return *s;
}

} // namespace

json policy_to_json(const AccessPolicy& p) {
    json j{{"agreedUsage", p.agreedUsage}, {"allowedLocations", p.allowedLocations}};
    j["defaultExpiryMs"] = p.defaultExpiry ? json(p.defaultExpiry->count()) : json(nullptr);
    return j;
}

AccessPolicy policy_from_json(const json& j) {
    AccessPolicy p;
    p.agreedUsage = j.value("agreedUsage", std::vector<std::string>{});
    p.allowedLocations = j.value("allowedLocations", std::vector<std::string>{});
    if (auto it = j.find("defaultExpiryMs"); it != j.end() && !it->is_null())
        p.defaultExpiry = Duration{it->get<std::int64_t>()};
    return p;
}

json value_to_json(const TimedValue& v) {
    return {{"v", scalar_to_json(v.value)},
            {"t", instant(v.timestamp)},
            {"exp", v.expiry ? instant(*v.expiry) : json(nullptr)},
            {"seq", v.ingestSeq}};
}

TimedValue value_from_json(const json& j, ValueKind kind) {
    TimedValue v;
    v.value = scalar(j.at("v"), kind);
    v.timestamp = instant(j.at("t"));
    if (const auto& e = j.at("exp"); !e.is_null()) v.expiry = instant(e);
    v.ingestSeq = j.at("seq").get<std::uint64_t>();
    return v;
}

json forecast_to_json(const Forecast& f) {
    json pts = json::array();
    for (const auto& p : f.points) pts.push_back({{"t", instant(p.time)}, {"v", scalar_to_json(p.value)}});
    return {{"source", f.sourceId}, {"createdAt", instant(f.createdAt)}, {"points", std::move(pts)}};
}

Forecast forecast_from_json(const json& j, ValueKind kind) {
    Forecast f;
    f.sourceId = j.at("source").get<std::string>();
    f.createdAt = instant(j.at("createdAt"));
    for (const auto& p : j.at("points")) f.points.push_back({instant(p.at("t")), scalar(p.at("v"), kind)});
    return f;
}

json entry_to_json(const Entry& e) {
    json values = json::array();
    for (const auto& v : e.values) values.push_back(value_to_json(v));
    json forecasts = json::array();
    for (const auto& f : e.forecasts) forecasts.push_back(forecast_to_json(f));
    json j{{"component", "entry"},
           {"name", e.name},
           {"kind", kind_name(e.valueKind)},
           {"unit", e.unit},
           {"policy", policy_to_json(e.policy)},
           {"values", std::move(values)},
           {"forecasts", std::move(forecasts)}};
    j["range"] = e.range ? json{{"lower", e.range->lower}, {"upper", e.range->upper}} : json(nullptr);
    return j;
}

namespace {

template <typename F>
auto decoding(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw NimError(ErrorCode::Corrupt, std::string("malformed ") + what + ": " + e.what());
    }
}

} // namespace

Entry entry_from_json(const json& j) {
    return decoding("entry", [&] {
        Entry e;
        e.name = j.at("name").get<std::string>();
        const auto kind = kind_from_name(j.at("kind").get<std::string>());
        if (!kind) throw NimError(ErrorCode::Corrupt, "unknown value kind in entry '" + e.name + "'");
        e.valueKind = *kind;
        e.unit = j.value("unit", "");
        if (auto it = j.find("policy"); it != j.end()) e.policy = policy_from_json(*it);
        if (auto it = j.find("range"); it != j.end() && !it->is_null())
            e.range = ValueRange{it->at("lower").get<double>(), it->at("upper").get<double>()};
        for (const auto& v : j.value("values", json::array())) e.values.push_back(value_from_json(v, e.valueKind));
        for (const auto& f : j.value("forecasts", json::array())) e.forecasts.push_back(forecast_from_json(f, e.valueKind));
        return e;
    });
}

json category_to_json(const Category& c) {
    json children = json::array();
    for (const auto& child : c.children)
        children.push_back(child.is_category() ? category_to_json(child.category()) : entry_to_json(child.entry()));
    return {{"component", "category"},
            {"name", c.name},
            {"instanceId", c.instanceId},
            {"sourceType", c.sourceType},
            {"references", c.references},
            {"children", std::move(children)}};
}

Category category_from_json(const json& j) {
    return decoding("category", [&] {
        Category c;
        c.name = j.at("name").get<std::string>();
        c.instanceId = j.value("instanceId", "");
        c.sourceType = j.value("sourceType", "");
        c.references = j.value("references", std::vector<std::string>{});
        for (const auto& child : j.value("children", json::array())) {
            if (child.at("component") == "category")
                c.add(category_from_json(child));
            else
                c.add(entry_from_json(child));
        }
        return c;
    });
}

} // namespace nim::meta
