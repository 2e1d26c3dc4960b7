#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nim/meta/model.hpp"
#include "nim/ndf/ast.hpp"

namespace nim::transform {

/// Per-field metadata carried alongside a concrete document (`"$meta"`).
struct EntryMeta {
    std::string unit;
    meta::AccessPolicy policy;
    std::optional<meta::ValueRange> range;

    bool is_default() const { return unit.empty() && policy == meta::AccessPolicy{} && !range; }

    friend bool operator==(const EntryMeta&, const EntryMeta&) = default;
};

/// A value in a registered model's own format.
///
/// `fields` holds one slot per declared field once normalized: a missing
/// current value is `nullopt`. A field left out of the map entirely was
/// withheld (e.g. by access control).
struct ConcreteInstance {
    std::string typeName; // qualified
    std::map<std::string, std::optional<Scalar>> fields;
    std::map<std::string, std::vector<ConcreteInstance>> nested; // keyed by nested type simple name
    std::map<std::string, EntryMeta> meta;                       // non-default metadata only
    std::optional<std::string> instanceId;

    friend bool operator==(const ConcreteInstance&, const ConcreteInstance&) = default;
};

/// Checks field names, kinds, nested shapes and metadata against the type and
/// fills the declared-but-missing slots. Throws NimError(Invalid).
ConcreteInstance normalize(const ndf::TypeDef& type, ConcreteInstance instance);

/// Wire document: JSON object keyed by field name, nested types as arrays of
/// objects, optional `"$id"` and `"$meta"`. Throws NimError(Invalid) on
/// schema violations; the result is normalized.
ConcreteInstance instance_from_json(const ndf::TypeDef& type, const nlohmann::json& doc);

/// Absent values become `null`; withheld fields are left out.
nlohmann::json instance_to_json(const ConcreteInstance& instance);

nlohmann::json entry_meta_to_json(const EntryMeta& m);
EntryMeta entry_meta_from_json(const nlohmann::json& j);

} // namespace nim::transform
