#include "nim/ndf/symbols.hpp"

#include <algorithm>

namespace nim::ndf {

void SymbolTable::add(TypeSymbol symbol) {
    auto key = symbol.qualifiedName;
    types_.insert_or_assign(std::move(key), std::move(symbol));
}

const TypeSymbol* SymbolTable::find(const std::string& qualifiedName) const {
    auto it = types_.find(qualifiedName);
    return it == types_.end() ? nullptr : &it->second;
}

std::vector<const TypeSymbol*> SymbolTable::by_relative_path(const std::string& path) const {
    std::vector<const TypeSymbol*> out;
    for (const auto& [_, s] : types_)
        if (s.relativePath == path) out.push_back(&s);
    return out;
}

LocalTypes::LocalTypes(const NdfModel& model) {
    const auto prefix_len = model.packageName.empty() ? 0 : model.packageName.size() + 1;
    for_each_type(model.types, [&](const TypeDef& t) {
        qualified_.emplace(t.qualifiedName, &t);
        relative_.emplace(t.qualifiedName.substr(prefix_len), &t);
        preorder_.push_back(&t);
    });
    for (const auto& t : model.types) top_.push_back(&t);
}

const TypeDef* LocalTypes::find_qualified(const std::string& qualifiedName) const {
    auto it = qualified_.find(qualifiedName);
    return it == qualified_.end() ? nullptr : it->second;
}

const TypeDef* LocalTypes::find(const std::string& name) const {
    if (auto* t = find_qualified(name)) return t;
    auto it = relative_.find(name);
    return it == relative_.end() ? nullptr : it->second;
}

bool LocalTypes::is_top_level(const TypeDef* t) const {
    return std::find(top_.begin(), top_.end(), t) != top_.end();
}

std::size_t LocalTypes::index_of(const TypeDef* t) const {
    return static_cast<std::size_t>(std::find(preorder_.begin(), preorder_.end(), t) - preorder_.begin());
}

NameResolution resolve_name(const std::string& name, const NdfModel& context, const SymbolTable& registry) {
    return resolve_name(name, context, LocalTypes(context), registry);
}

NameResolution resolve_name(const std::string& name, const NdfModel& context, const LocalTypes& local,
                            const SymbolTable& registry) {
    if (const TypeDef* t = local.find(name)) return {ResolveStatus::Local, t->qualifiedName, {}};

    if (!context.packageName.empty()) {
        if (const TypeSymbol* s = registry.find(context.packageName + "." + name))
            return {ResolveStatus::SamePackage, s->qualifiedName, {}};
    }

    if (const TypeSymbol* s = registry.find(name)) return {ResolveStatus::Global, s->qualifiedName, {}};

    const auto matches = registry.by_relative_path(name);
    if (matches.size() == 1) return {ResolveStatus::Global, matches.front()->qualifiedName, {}};
    NameResolution r;
    if (matches.size() > 1) {
        r.status = ResolveStatus::Ambiguous;
        for (const auto* m : matches) r.candidates.push_back(m->qualifiedName);
    }
    return r;
}

std::vector<TypeSymbol> make_symbols(const NdfModel& model,
                                     const std::map<std::string, std::vector<std::string>>& resolvedSources,
                                     std::size_t firstOrder) {
    std::vector<TypeSymbol> out;
    const auto prefix_len = model.packageName.empty() ? 0 : model.packageName.size() + 1;
    std::vector<const TypeDef*> top;
    for (const auto& t : model.types) top.push_back(&t);
    std::size_t order = firstOrder;
    for_each_type(model.types, [&](const TypeDef& t) {
        TypeSymbol s;
        s.qualifiedName = t.qualifiedName;
        s.packageName = model.packageName;
        s.relativePath = t.qualifiedName.substr(prefix_len);
        s.modelId = model.modelId;
        s.order = order++;
        s.fields = t.fields;
        for (const auto& n : t.nestedTypes) s.nestedTypes.push_back(n.name);
        s.topLevel = std::find(top.begin(), top.end(), &t) != top.end();
        if (auto it = resolvedSources.find(t.qualifiedName); it != resolvedSources.end()) {
            s.isVirtual = true;
            s.mappingSources = it->second;
        }
        out.push_back(std::move(s));
    });
    return out;
}

} // namespace nim::ndf
