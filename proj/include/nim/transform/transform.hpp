#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nim/meta/model.hpp"
#include "nim/ndf/ast.hpp"
#include "nim/ndf/checker.hpp"
#include "nim/ndf/symbols.hpp"
#include "nim/store/store.hpp"
#include "nim/transform/instance.hpp"

namespace nim::transform {

/// `StandardRoom` -> `standardroom`.
std::string category_name(std::string_view typeName);

/// Concrete -> generic. The category is named after the lowercased type name;
/// each field becomes an entry of the same name holding one value stamped
/// `ingestTime`; each nested type becomes a child category (lowercased name)
/// whose children are the nested instances, named by position ("0", "1", ...).
/// Throws NimError(Invalid) when the instance does not match the type.
meta::Category to_generic(const ndf::TypeDef& type, const ConcreteInstance& instance, Instant ingestTime);

enum class MissingEntry { Error, Omit };

/// Generic -> concrete for a category produced from the same type. Each field
/// takes the entry's current value at `at` (nullopt if none). Entries missing
/// from the category raise NimError(Invalid), or are left out with
/// MissingEntry::Omit (used for access-filtered snapshots).
ConcreteInstance from_generic(const ndf::TypeDef& type, const meta::Category& category, Instant at,
                              MissingEntry missing = MissingEntry::Error);

/// Field correspondences for one source type: target field -> source field.
struct SourceMapping {
    std::string sourceType;
    std::map<std::string, std::string> fieldMap;

    friend bool operator==(const SourceMapping&, const SourceMapping&) = default;
};

/// How a virtual type is populated. Sources appear in registration order and
/// only if they cover every target field; chains through other virtual types
/// are flattened to the stored types at their end.
struct MappingPlan {
    std::string targetType;
    std::vector<std::string> targetFields;
    std::vector<SourceMapping> perSource;
    std::vector<ndf::Diagnostic> diagnostics; // excluded sources, as warnings

    // Rules with virtual sources substituted down to stored types, before the
    // coverage filter: stored type -> (target field -> source field). Chains
    // expand through this, not through perSource.
    std::map<std::string, std::map<std::string, std::string>> substituted;

    const SourceMapping* find(const std::string& sourceType) const;
};

/// Lookup for plans of virtual types that are already registered.
using PlanLookup = std::function<const MappingPlan*(const std::string& qualifiedType)>;

/// Builds one plan per virtual type of `model`, in definition order.
/// Expects `analysis` to be the (error-free) result of ndf::analyze.
std::vector<MappingPlan> build_plans(const ndf::NdfModel& model, const ndf::Analysis& analysis,
                                     const ndf::SymbolTable& registry, const PlanLookup& registered);

/// Reads every stored instance of every planned source type (sources in plan
/// order, instances in ingest order) and emits it in the target format. The
/// emitted instanceId is that of the source instance. Access control and
/// expiry apply as in Store::query; withheld source entries leave the target
/// field out, missing current values leave it nullopt.
std::vector<ConcreteInstance> resolve_mapping(const MappingPlan& plan, const store::Store& store,
                                              std::span<const std::string> principals,
                                              std::optional<Instant> at = std::nullopt);

} // namespace nim::transform
