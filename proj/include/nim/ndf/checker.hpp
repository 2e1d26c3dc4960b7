#pragma once

#include <map>
#include <string>
#include <vector>

#include "nim/ndf/ast.hpp"
#include "nim/ndf/symbols.hpp"

namespace nim::ndf {

struct ResolvedSource {
    std::string type; // qualified
    std::string field;

    friend bool operator==(const ResolvedSource&, const ResolvedSource&) = default;
};

/// A mapping rule whose names have all been resolved to qualified form.
struct ResolvedRule {
    std::string targetType;
    std::string targetField;
    std::vector<ResolvedSource> sources;
    SourcePos pos;
};

struct Analysis {
    std::vector<Diagnostic> diagnostics;
    std::vector<ResolvedRule> rules;
    /// Virtual (mapping target) type -> qualified source types, in rule order.
    std::map<std::string, std::vector<std::string>> virtualSources;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Runs the context conditions on a parsed model against the registered
/// symbols. Codes:
///   CC1 qualified type name already defined (in this model or the registry)
///   CC2 duplicate field, or field clashing with a nested type
///   CC3 mapping target type/field not defined in this model, or mapped twice
///   CC4 mapping source type or field unknown / ambiguous
///   CC5 source field kind differs from target field kind
///   CC6 mapping dependencies form a cycle
///   CC7 virtual type not fully covered by rules, nested, or containing nested types
Analysis analyze(const NdfModel& model, const SymbolTable& registry);

/// Diagnostics only; empty iff every condition holds.
std::vector<Diagnostic> check_context_conditions(const NdfModel& model, const SymbolTable& registry);

} // namespace nim::ndf
