#include "nim/service/service.hpp"

#include <algorithm>

#include "nim/meta/ops.hpp"
#include "nim/meta/serialize.hpp"
#include "nim/ndf/printer.hpp"
#include "nim/transform/transform.hpp"

namespace nim::service {

using nlohmann::json;

Response Response::error(int status, const std::string& message) {
    return json(status, {{"error", message}});
}

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Conflict: return 409;
    case ErrorCode::Invalid: return 422;
    case ErrorCode::Forbidden: return 403;
    case ErrorCode::OutOfRange: return 422;
    case ErrorCode::Corrupt: return 500;
    }
    return 500;
}

std::vector<std::string> parse_principals(std::string_view header) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= header.size()) {
        auto comma = header.find(',', pos);
        if (comma == std::string_view::npos) comma = header.size();
        auto part = header.substr(pos, comma - pos);
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.front()))) part.remove_prefix(1);
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.back()))) part.remove_suffix(1);
        if (!part.empty()) out.emplace_back(part);
        pos = comma + 1;
    }
    return out;
}

namespace {

struct BadRequest {
    std::string message;
};

template <typename F>
Response guarded(F&& f) {
    try {
        return f();
    } catch (const BadRequest& e) {
        return Response::error(400, e.message);
    } catch (const NimError& e) {
        return Response::error(http_status(e.code()), e.what());
    } catch (const json::exception& e) {
        return Response::error(400, std::string("malformed JSON: ") + e.what());
    }
}

std::optional<Instant> instant_param(const std::optional<std::string>& text, const char* name) {
    if (!text) return std::nullopt;
    auto t = parse_iso8601(*text);
    if (!t) throw BadRequest{std::string("parameter '") + name + "' is not an ISO-8601 instant: " + *text};
    return t;
}

json diagnostics_json(const std::vector<ndf::Diagnostic>& diags) {
    json arr = json::array();
    for (const auto& d : diags)
        arr.push_back({{"severity", d.severity == ndf::Severity::Error ? "error" : "warning"},
                       {"code", d.code},
                       {"message", d.message},
                       {"line", d.line},
                       {"column", d.column}});
    return arr;
}

json value_json(const meta::TimedValue& v) {
    return {{"value", scalar_to_json(v.value)},
            {"timestamp", format_iso8601(v.timestamp)},
            {"expiry", v.expiry ? json(format_iso8601(*v.expiry)) : json(nullptr)}};
}

json forecast_json(const meta::Forecast& f, bool active) {
    json pts = json::array();
    for (const auto& p : f.points) pts.push_back({{"t", format_iso8601(p.time)}, {"v", scalar_to_json(p.value)}});
    return {{"source", f.sourceId}, {"createdAt", format_iso8601(f.createdAt)}, {"active", active}, {"points", pts}};
}

const TypeBinding& binding(const RegistrySnapshot& snap, const std::string& type) {
    const TypeBinding* b = snap.find(type);
    if (!b) throw NimError(ErrorCode::NotFound, "no registered type '" + type + "'");
    return *b;
}

const TypeBinding& native_binding(const RegistrySnapshot& snap, const std::string& type) {
    const TypeBinding& b = binding(snap, type);
    if (b.is_virtual())
        throw NimError(ErrorCode::Conflict, "type '" + type + "' is a mapping target and is read-only");
    return b;
}

const ndf::FieldDef& field_of(const TypeBinding& b, const std::string& field) {
    const ndf::FieldDef* f = b.def->find_field(field);
    if (!f) throw NimError(ErrorCode::NotFound, "type '" + b.def->qualifiedName + "' has no field '" + field + "'");
    return *f;
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        throw BadRequest{std::string("request body is not JSON: ") + e.what()};
    }
}

} // namespace

NimService::NimService(store::Store& store, ModelRegistry& registry) : store_(store), registry_(registry) {}

Response NimService::register_model(const std::string& ndfSource) {
    return guarded([&] {
        RegistrationResult r = registry_.register_model(ndfSource);
        if (!r.accepted())
            return Response::json(422, {{"status", "rejected"}, {"diagnostics", diagnostics_json(r.diagnostics)}});
        const auto snap = registry_.snapshot();
        json body = {{"status", "accepted"}, {"modelId", *r.modelId}, {"diagnostics", diagnostics_json(r.diagnostics)}};
        for (const auto& m : snap->models)
            if (m->descriptor.modelId == *r.modelId) body["descriptor"] = descriptor_to_json(m->descriptor);
        return Response::json(201, std::move(body));
    });
}

Response NimService::list_models() const {
    json arr = json::array();
    for (const auto& d : registry_.list_models()) arr.push_back(descriptor_to_json(d));
    return Response::json(200, std::move(arr));
}

Response NimService::get_model(const std::string& modelId) const {
    for (const auto& m : registry_.snapshot()->models)
        if (m->descriptor.modelId == modelId) return {200, nullptr, ndf::pretty_print(m->model)};
    return Response::error(404, "no model '" + modelId + "'");
}

Response NimService::ingest(const std::string& type, const std::string& body) {
    return guarded([&] {
        const auto snap = registry_.snapshot();
        const TypeBinding& b = native_binding(*snap, type);
        const transform::ConcreteInstance doc = transform::instance_from_json(*b.def, parse_body(body));
        for (const auto& hook : hooks_) hook(*b.def, doc, store_);
        const std::string id = store_.create_instance(transform::to_generic(*b.def, doc, store_.now()));
        return Response::json(201, {{"instanceId", id}});
    });
}

Response NimService::get_instances(const std::string& type, const std::vector<std::string>& principals,
                                   std::optional<std::string> at) const {
    return guarded([&] {
        const auto snap = registry_.snapshot();
        const TypeBinding& b = binding(*snap, type);
        const Instant when = instant_param(at, "at").value_or(store_.now());
        json arr = json::array();
        if (b.is_virtual()) {
            for (const auto& inst : transform::resolve_mapping(*b.plan, store_, principals, when))
                arr.push_back(transform::instance_to_json(inst));
        } else {
            for (const auto& cat : store_.query(type, principals, when))
                arr.push_back(transform::instance_to_json(
                    transform::from_generic(*b.def, cat, when, transform::MissingEntry::Omit)));
        }
        return Response::json(200, std::move(arr));
    });
}

Response NimService::get_instance(const std::string& type, const std::string& instanceId,
                                  const std::vector<std::string>& principals, std::optional<std::string> at) const {
    return guarded([&] {
        const auto snap = registry_.snapshot();
        const TypeBinding& b = binding(*snap, type);
        const Instant when = instant_param(at, "at").value_or(store_.now());
        if (b.is_virtual()) {
            for (const auto& inst : transform::resolve_mapping(*b.plan, store_, principals, when))
                if (inst.instanceId == instanceId) return Response::json(200, transform::instance_to_json(inst));
            return Response::error(404, "no instance '" + instanceId + "' of '" + type + "'");
        }
        auto cat = store_.get_instance(instanceId, principals, when);
        if (!cat || cat->sourceType != type) return Response::error(404, "no instance '" + instanceId + "' of '" + type + "'");
        return Response::json(200, transform::instance_to_json(
                                       transform::from_generic(*b.def, *cat, when, transform::MissingEntry::Omit)));
    });
}

namespace {

void require_instance(const store::Store& store, const std::string& type, const std::string& instanceId) {
    auto cat = store.get_instance(instanceId, {}, std::nullopt);
    if (!cat || cat->sourceType != type)
        throw NimError(ErrorCode::NotFound, "no instance '" + instanceId + "' of '" + type + "'");
}

} // namespace

Response NimService::append_value(const std::string& type, const std::string& instanceId, const std::string& field,
                                  const std::string& body) {
    return guarded([&] {
        const auto snap = registry_.snapshot();
        const TypeBinding& b = native_binding(*snap, type);
        const ndf::FieldDef& f = field_of(b, field);
        require_instance(store_, type, instanceId);

        const json req = parse_body(body);
        if (!req.is_object() || !req.contains("value")) throw BadRequest{"body must be an object with \"value\""};
        auto value = scalar_from_json(req.at("value"), f.fieldType);
        if (!value)
            throw NimError(ErrorCode::Invalid, "field '" + field + "' expects " + std::string(kind_name(f.fieldType)));
        std::optional<Instant> ts, exp;
        if (auto it = req.find("timestamp"); it != req.end() && !it->is_null())
            ts = instant_param(it->get<std::string>(), "timestamp");
        if (auto it = req.find("expiry"); it != req.end() && !it->is_null())
            exp = instant_param(it->get<std::string>(), "expiry");

        const std::vector<std::string> path{field};
        const store::AppendOutcome out = store_.append_value(instanceId, path, *value, ts, exp);
        switch (out.status) {
        case store::AppendStatus::Stored:
            return Response::json(201, {{"status", "stored"}, {"value", value_json(*out.value)}});
        case store::AppendStatus::Deduplicated:
            return Response::json(200, {{"status", "deduplicated"}, {"current", value_json(*out.value)}});
        case store::AppendStatus::Rejected:
            break;
        }
        const bool range = out.reason == store::RejectReason::Range;
        return Response::json(range ? 422 : 403, {{"status", "rejected"},
                                                  {"reason", range ? "range" : "storage-location"},
                                                  {"message", out.message}});
    });
}

Response NimService::get_history(const std::string& type, const std::string& instanceId, const std::string& field,
                                 std::optional<std::string> from, std::optional<std::string> to,
                                 const std::vector<std::string>& principals, std::optional<std::string> at) const {
    return guarded([&] {
        const auto snap = registry_.snapshot();
        const TypeBinding& b = native_binding(*snap, type);
        field_of(b, field);
        require_instance(store_, type, instanceId);
        const Instant lo = instant_param(from, "from").value_or(Instant::min());
        const Instant hi = instant_param(to, "to").value_or(Instant::max());
        if (lo > hi) throw BadRequest{"'from' is after 'to'"};
        const Instant when = instant_param(at, "at").value_or(store_.now());
        const std::vector<std::string> path{field};
        const store::EntryView view = store_.read_entry(instanceId, path);
        if (meta::check_access(view.entry.policy, principals) == meta::Decision::Deny)
            return Response::error(403, "entry '" + field + "' is not readable by the given principals");
        json arr = json::array();
        for (const auto& v : meta::history(view.entry, lo, hi, when)) arr.push_back(value_json(v));
        return Response::json(200, {{"field", field}, {"unit", view.entry.unit}, {"values", std::move(arr)}});
    });
}

Response NimService::post_forecast(const std::string& type, const std::string& instanceId, const std::string& field,
                                   const std::string& body) {
    return guarded([&] {
        const auto snap = registry_.snapshot();
        const TypeBinding& b = native_binding(*snap, type);
        const ndf::FieldDef& f = field_of(b, field);
        require_instance(store_, type, instanceId);
        const json req = parse_body(body);
        if (!req.is_object()) throw BadRequest{"body must be an object"};
        const std::string source = req.value("source", "");
        std::vector<meta::ForecastPoint> points;
        for (const auto& p : req.value("points", json::array())) {
            if (!p.is_object() || !p.contains("t") || !p.contains("v") || !p.at("t").is_string())
                throw BadRequest{"forecast points look like {\"t\": ISO-8601, \"v\": value}"};
            auto t = instant_param(p.at("t").get<std::string>(), "t");
            auto v = scalar_from_json(p.at("v"), f.fieldType);
            if (!v) throw NimError(ErrorCode::Invalid, "forecast value " + p.at("v").dump() + " is not " +
                                                           std::string(kind_name(f.fieldType)));
            points.push_back({*t, *v});
        }
        const std::vector<std::string> path{field};
        const meta::Forecast fc = store_.add_forecast(instanceId, path, source, std::move(points));
        return Response::json(201, forecast_json(fc, true));
    });
}

Response NimService::get_forecasts(const std::string& type, const std::string& instanceId, const std::string& field,
                                   std::optional<std::string> source, const std::vector<std::string>& principals) const {
    return guarded([&] {
        const auto snap = registry_.snapshot();
        const TypeBinding& b = native_binding(*snap, type);
        field_of(b, field);
        require_instance(store_, type, instanceId);
        const std::vector<std::string> path{field};
        const store::EntryView view = store_.read_entry(instanceId, path);
        if (meta::check_access(view.entry.policy, principals) == meta::Decision::Deny)
            return Response::error(403, "entry '" + field + "' is not readable by the given principals");
        json arr = json::array();
        for (const auto& f : view.entry.forecasts) {
            if (source && f.sourceId != *source) continue;
            arr.push_back(forecast_json(f, meta::active_forecast(view.entry, f.sourceId) == &f));
        }
        return Response::json(200, std::move(arr));
    });
}

Response NimService::purge(std::optional<std::string> now) {
    return guarded([&] {
        const Instant when = instant_param(now, "now").value_or(store_.now());
        return Response::json(200, {{"deleted", store_.purge_expired(when)}});
    });
}

Response NimService::generic_components(const std::vector<std::string>& principals) const {
    return guarded([&] {
        json arr = json::array();
        for (const auto& c : store_.all_instances(principals)) arr.push_back(meta::category_to_json(c));
        return Response::json(200, std::move(arr));
    });
}

} // namespace nim::service
