#include "nim/transform/transform.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "nim/meta/ops.hpp"

namespace nim::transform {

std::string category_name(std::string_view typeName) {
    std::string out(typeName);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

meta::Category to_generic(const ndf::TypeDef& type, const ConcreteInstance& raw, Instant ingestTime) {
    const ConcreteInstance instance = normalize(type, raw);
    meta::Category c;
    c.name = category_name(type.name);
    c.sourceType = type.qualifiedName;
    c.instanceId = instance.instanceId.value_or("");
    for (const auto& f : type.fields) {
        meta::Entry e;
        e.name = f.name;
        e.valueKind = f.fieldType;
        if (auto it = instance.meta.find(f.name); it != instance.meta.end()) {
            e.unit = it->second.unit;
            e.policy = it->second.policy;
            e.range = it->second.range;
        }
        if (const auto& v = instance.fields.at(f.name)) e.values.push_back({*v, ingestTime, std::nullopt, 0});
        c.add(std::move(e));
    }
    for (const auto& n : type.nestedTypes) {
        meta::Category container;
        container.name = category_name(n.name);
        const auto& list = instance.nested.at(n.name);
        for (std::size_t i = 0; i < list.size(); ++i) {
            meta::Category child = to_generic(n, list[i], ingestTime);
            child.name = std::to_string(i);
            container.add(std::move(child));
        }
        c.add(std::move(container));
    }
    return c;
}

ConcreteInstance from_generic(const ndf::TypeDef& type, const meta::Category& category, Instant at,
                              MissingEntry missing) {
    if (category.sourceType != type.qualifiedName)
        throw NimError(ErrorCode::Invalid, "category '" + category.name + "' originates from '" + category.sourceType +
                                               "', not '" + type.qualifiedName + "'");
    ConcreteInstance out;
    out.typeName = type.qualifiedName;
    if (!category.instanceId.empty()) out.instanceId = category.instanceId;
    for (const auto& f : type.fields) {
        const meta::Entry* e = category.find_entry(f.name);
        if (!e) {
            if (missing == MissingEntry::Error)
                throw NimError(ErrorCode::Invalid, "category '" + category.name + "' has no entry '" + f.name + "'");
            continue;
        }
        if (e->valueKind != f.fieldType)
            throw NimError(ErrorCode::Invalid, "entry '" + f.name + "' holds " + std::string(kind_name(e->valueKind)));
        auto cur = meta::current_value(*e, at);
        out.fields[f.name] = cur ? std::optional<Scalar>(cur->value) : std::nullopt;
        EntryMeta m{e->unit, e->policy, e->range};
        if (!m.is_default()) out.meta[f.name] = std::move(m);
    }
    for (const auto& n : type.nestedTypes) {
        const meta::Category* container = category.find_category(category_name(n.name));
        if (!container) {
            if (missing == MissingEntry::Error)
                throw NimError(ErrorCode::Invalid, "category '" + category.name + "' has no '" + n.name + "' children");
            continue;
        }
        auto& list = out.nested[n.name];
        for (const auto& child : container->children)
            if (child.is_category()) list.push_back(from_generic(n, child.category(), at, missing));
    }
    return out;
}

const SourceMapping* MappingPlan::find(const std::string& sourceType) const {
    auto it = std::find_if(perSource.begin(), perSource.end(),
                           [&](const SourceMapping& s) { return s.sourceType == sourceType; });
    return it == perSource.end() ? nullptr : &*it;
}

namespace {

class PlanBuilder {
public:
    PlanBuilder(const ndf::NdfModel& model, const ndf::Analysis& analysis, const ndf::SymbolTable& registry,
                const PlanLookup& registered)
        : model_(model), analysis_(analysis), registry_(registry), registered_(registered), local_(model) {}

    std::vector<MappingPlan> run() {
        std::vector<MappingPlan> out;
        for (const ndf::TypeDef* t : local_.preorder())
            if (analysis_.virtualSources.count(t->qualifiedName)) out.push_back(plan_for(t->qualifiedName));
        return out;
    }

private:
    std::size_t order_of(const std::string& type) const {
        if (const ndf::TypeDef* t = local_.find_qualified(type)) return registry_.size() + 1'000'000 + local_.index_of(t);
        if (const ndf::TypeSymbol* s = registry_.find(type)) return s->order;
        return std::size_t(-1);
    }

    bool is_virtual(const std::string& type) const {
        if (local_.find_qualified(type)) return analysis_.virtualSources.count(type) > 0;
        const ndf::TypeSymbol* s = registry_.find(type);
        return s && s->isVirtual;
    }

    const MappingPlan* plan_of(const std::string& type) {
        if (local_.find_qualified(type)) return &plan_for(type);
        return registered_ ? registered_(type) : nullptr;
    }

    const MappingPlan& plan_for(const std::string& target) {
        if (auto it = built_.find(target); it != built_.end()) return it->second;

        MappingPlan plan;
        plan.targetType = target;
        const ndf::TypeDef* t = local_.find_qualified(target);
        for (const auto& f : t->fields) plan.targetFields.push_back(f.name);

        // Substitute virtual sources by their own (unfiltered) correspondences,
        // keeping the first alternative per stored type and target field.
        auto& expanded = plan.substituted;
        for (const auto& rule : analysis_.rules) {
            if (rule.targetType != target) continue;
            for (const auto& src : rule.sources) {
                if (!is_virtual(src.type)) {
                    expanded[src.type].try_emplace(rule.targetField, src.field);
                    continue;
                }
                const MappingPlan* inner = plan_of(src.type);
                if (!inner) continue;
                for (const auto& [stored, fmap] : inner->substituted)
                    if (auto hit = fmap.find(src.field); hit != fmap.end())
                        expanded[stored].try_emplace(rule.targetField, hit->second);
            }
        }

        for (const auto& [src, fmap] : expanded) {
            const bool covers = std::all_of(plan.targetFields.begin(), plan.targetFields.end(),
                                            [&](const std::string& f) { return fmap.count(f) > 0; });
            if (covers) {
                plan.perSource.push_back({src, fmap});
            } else {
                plan.diagnostics.push_back({ndf::Severity::Warning, "PLAN",
                                            "source type '" + src + "' maps " + std::to_string(fmap.size()) + " of " +
                                                std::to_string(plan.targetFields.size()) + " fields of '" + target +
                                                "' and is excluded",
                                            t->pos.line, t->pos.column});
            }
        }
        std::stable_sort(plan.perSource.begin(), plan.perSource.end(), [&](const SourceMapping& a, const SourceMapping& b) {
            return order_of(a.sourceType) < order_of(b.sourceType);
        });
        return built_.emplace(target, std::move(plan)).first->second;
    }

    const ndf::NdfModel& model_;
    const ndf::Analysis& analysis_;
    const ndf::SymbolTable& registry_;
    const PlanLookup& registered_;
    ndf::LocalTypes local_;
    std::map<std::string, MappingPlan> built_;
};

} // namespace

std::vector<MappingPlan> build_plans(const ndf::NdfModel& model, const ndf::Analysis& analysis,
                                     const ndf::SymbolTable& registry, const PlanLookup& registered) {
    return PlanBuilder(model, analysis, registry, registered).run();
}

std::vector<ConcreteInstance> resolve_mapping(const MappingPlan& plan, const store::Store& store,
                                              std::span<const std::string> principals, std::optional<Instant> at) {
    const Instant when = at.value_or(store.now());
    std::vector<ConcreteInstance> out;
    for (const auto& sm : plan.perSource) {
        for (const auto& cat : store.query(sm.sourceType, principals, when)) {
            ConcreteInstance inst;
            inst.typeName = plan.targetType;
            if (!cat.instanceId.empty()) inst.instanceId = cat.instanceId;
            for (const auto& [targetField, sourceField] : sm.fieldMap) {
                const meta::Entry* e = cat.find_entry(sourceField);
                if (!e) continue;
                auto cur = meta::current_value(*e, when);
                inst.fields[targetField] = cur ? std::optional<Scalar>(cur->value) : std::nullopt;
            }
            out.push_back(std::move(inst));
        }
    }
    return out;
}

} // namespace nim::transform
