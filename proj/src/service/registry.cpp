#include "nim/service/registry.hpp"

#include "nim/ndf/parser.hpp"

namespace nim::service {

using nlohmann::json;

const TypeBinding* RegistrySnapshot::find(const std::string& qualifiedType) const {
    auto it = types.find(qualifiedType);
    return it == types.end() ? nullptr : &it->second;
}

const transform::MappingPlan* RegistrySnapshot::plan(const std::string& qualifiedType) const {
    const TypeBinding* b = find(qualifiedType);
    return b ? b->plan : nullptr;
}

json descriptor_to_json(const AdapterDescriptor& d) {
    json plans = json::array();
    for (const auto& p : d.mappingPlans) {
        json sources = json::array();
        for (const auto& s : p.perSource) sources.push_back({{"sourceType", s.sourceType}, {"fields", s.fieldMap}});
        json warnings = json::array();
        for (const auto& w : p.diagnostics) warnings.push_back(w.str());
        plans.push_back({{"targetType", p.targetType}, {"sources", std::move(sources)}, {"warnings", std::move(warnings)}});
    }
    json endpoints = json::array();
    for (const auto& e : d.endpoints) endpoints.push_back({{"method", e.method}, {"path", e.path}});
    return {{"modelId", d.modelId},
            {"types", d.qualifiedTypes},
            {"mappingPlans", std::move(plans)},
            {"endpoints", std::move(endpoints)},
            {"registeredAt", format_iso8601(d.registeredAt)}};
}

std::vector<Endpoint> endpoints_for(const std::string& qualifiedType, bool isVirtual) {
    const std::string base = "/v1/types/" + qualifiedType + "/instances";
    if (isVirtual) return {{"GET", base}, {"GET", base + "/{iid}"}};
    const std::string entry = base + "/{iid}/entries/{field}";
    return {{"POST", base},
            {"GET", base},
            {"GET", base + "/{iid}"},
            {"POST", entry + "/values"},
            {"GET", entry + "/history"},
            {"POST", entry + "/forecasts"},
            {"GET", entry + "/forecasts"}};
}

PreparedModel prepare_model(std::string_view source, const RegistrySnapshot& base, const std::string& modelId) {
    PreparedModel out;
    ndf::ParseResult parsed = ndf::parse(source);
    if (!parsed.ok()) {
        out.diagnostics = std::move(parsed.diagnostics);
        return out;
    }
    parsed.model->modelId = modelId;
    out.analysis = ndf::analyze(*parsed.model, base.symbols);
    out.diagnostics = out.analysis.diagnostics;
    if (out.analysis.ok()) {
        out.plans = transform::build_plans(*parsed.model, out.analysis, base.symbols,
                                           [&](const std::string& t) { return base.plan(t); });
        for (const auto& p : out.plans)
            out.diagnostics.insert(out.diagnostics.end(), p.diagnostics.begin(), p.diagnostics.end());
    }
    out.model = std::move(parsed.model);
    return out;
}

ModelRegistry::ModelRegistry(store::Store& store) : store_(store), current_(std::make_shared<RegistrySnapshot>()) {
    for (const auto& stored : store_.models()) {
        PreparedModel prepared = prepare_model(stored.source, *current_, stored.modelId);
        if (!prepared.ok()) {
            restoreWarnings_.push_back("model " + stored.modelId + " no longer validates and was skipped");
            continue;
        }
        current_ = with_model(*current_, std::move(prepared), stored.modelId, stored.registeredAt);
    }
}

std::shared_ptr<RegistrySnapshot> ModelRegistry::with_model(const RegistrySnapshot& base, PreparedModel prepared,
                                                            const std::string& modelId, Instant at) const {
    auto next = std::make_shared<RegistrySnapshot>(base);
    auto reg = std::make_shared<RegisteredModel>();
    reg->model = std::move(*prepared.model);
    reg->model.modelId = modelId;
    reg->plans = std::move(prepared.plans);

    AdapterDescriptor& d = reg->descriptor;
    d.modelId = modelId;
    d.mappingPlans = reg->plans;
    d.registeredAt = at;
    ndf::for_each_type(reg->model.types, [&](const ndf::TypeDef& t) {
        d.qualifiedTypes.push_back(t.qualifiedName);
        const bool isVirtual = prepared.analysis.virtualSources.count(t.qualifiedName) > 0;
        for (auto& e : endpoints_for(t.qualifiedName, isVirtual)) d.endpoints.push_back(std::move(e));
    });

    std::size_t order = 0;
    for (const auto& [_, s] : base.symbols.all()) order = std::max(order, s.order + 1);
    for (auto& sym : ndf::make_symbols(reg->model, prepared.analysis.virtualSources, order))
        next->symbols.add(std::move(sym));

    std::shared_ptr<const RegisteredModel> shared = reg;
    ndf::for_each_type(shared->model.types, [&](const ndf::TypeDef& t) {
        TypeBinding b;
        b.def = &t;
        b.model = shared;
        for (const auto& p : shared->plans)
            if (p.targetType == t.qualifiedName) b.plan = &p;
        next->types.insert_or_assign(t.qualifiedName, std::move(b));
    });
    next->models.push_back(std::move(shared));
    return next;
}

RegistrationResult ModelRegistry::register_model(std::string_view source) {
    std::lock_guard write(writeMutex_);
    const auto base = snapshot();
    const std::string modelId = "m-" + std::to_string(store_.models().size() + 1);

    RegistrationResult result;
    PreparedModel prepared = prepare_model(source, *base, modelId);
    result.diagnostics = prepared.diagnostics;
    if (!prepared.ok()) return result;

    std::vector<std::string> types;
    ndf::for_each_type(prepared.model->types, [&](const ndf::TypeDef& t) { types.push_back(t.qualifiedName); });
    const Instant at = store_.now();
    try {
        store_.record_model(modelId, std::string(source), types, at);
    } catch (const std::exception& e) {
        result.diagnostics.push_back({ndf::Severity::Error, "IO", e.what(), 1, 1});
        return result;
    }
    publish(with_model(*base, std::move(prepared), modelId, at));
    result.status = RegistrationStatus::Accepted;
    result.modelId = modelId;
    return result;
}

std::shared_ptr<const RegistrySnapshot> ModelRegistry::snapshot() const {
    std::lock_guard lock(publishMutex_);
    return current_;
}

void ModelRegistry::publish(std::shared_ptr<const RegistrySnapshot> next) {
    std::lock_guard lock(publishMutex_);
    current_ = std::move(next);
}

std::vector<AdapterDescriptor> ModelRegistry::list_models() const {
    std::vector<AdapterDescriptor> out;
    for (const auto& m : snapshot()->models) out.push_back(m->descriptor);
    return out;
}

} // namespace nim::service
