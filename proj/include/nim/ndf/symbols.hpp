#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nim/ndf/ast.hpp"

namespace nim::ndf {

/// What the checker needs to know about one already-registered type.
struct TypeSymbol {
    std::string qualifiedName;
    std::string packageName;
    std::string relativePath; // enclosing types + name, without package
    std::string modelId;
    std::size_t order = 0;    // global registration order (model order, then pre-order in file)
    std::vector<FieldDef> fields;
    std::vector<std::string> nestedTypes;
    bool isVirtual = false;
    std::vector<std::string> mappingSources; // qualified names this virtual type maps from
    bool topLevel = true;
};

/// Immutable-by-convention index of registered types, keyed by qualified name.
class SymbolTable {
public:
    void add(TypeSymbol symbol);

    const TypeSymbol* find(const std::string& qualifiedName) const;
    std::vector<const TypeSymbol*> by_relative_path(const std::string& path) const;
    const std::map<std::string, TypeSymbol>& all() const { return types_; }
    std::size_t size() const { return types_.size(); }

private:
    std::map<std::string, TypeSymbol> types_;
};

/// Local view of one model: qualified and package-relative lookups.
class LocalTypes {
public:
    explicit LocalTypes(const NdfModel& model);

    const TypeDef* find_qualified(const std::string& qualifiedName) const;
    const TypeDef* find(const std::string& name) const; // qualified or relative
    bool is_top_level(const TypeDef* t) const;
    std::size_t index_of(const TypeDef* t) const;       // pre-order position
    const std::vector<const TypeDef*>& preorder() const { return preorder_; }

private:
    std::map<std::string, const TypeDef*> qualified_;
    std::map<std::string, const TypeDef*> relative_;
    std::vector<const TypeDef*> preorder_;
    std::vector<const TypeDef*> top_;
};

enum class ResolveStatus { Local, SamePackage, Global, Unresolved, Ambiguous };

struct NameResolution {
    ResolveStatus status = ResolveStatus::Unresolved;
    std::string qualifiedName;
    std::vector<std::string> candidates; // filled on ambiguity

    bool ok() const { return status != ResolveStatus::Unresolved && status != ResolveStatus::Ambiguous; }
    bool local() const { return status == ResolveStatus::Local; }
};

/// Resolves a possibly-qualified type name: types in `context` first, then the
/// same package in `registry`, then a globally unique name. More than one
/// global match is reported as ambiguous, never picked.
NameResolution resolve_name(const std::string& name, const NdfModel& context, const SymbolTable& registry);
NameResolution resolve_name(const std::string& name, const NdfModel& context, const LocalTypes& local,
                            const SymbolTable& registry);

/// Symbols for every type of an accepted model. `resolvedSources` maps each
/// virtual type to the qualified names it maps from.
std::vector<TypeSymbol> make_symbols(const NdfModel& model,
                                     const std::map<std::string, std::vector<std::string>>& resolvedSources,
                                     std::size_t firstOrder);

} // namespace nim::ndf
