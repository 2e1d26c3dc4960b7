#pragma once

#include <nlohmann/json.hpp>

#include "nim/meta/model.hpp"

namespace nim::meta {

// Canonical JSON forms of the generic model. Instants are epoch milliseconds
// except scalar values, which use the wire form of their kind. Used by the
// journal, store snapshots and the debug dump.

nlohmann::json policy_to_json(const AccessPolicy& p);
AccessPolicy policy_from_json(const nlohmann::json& j);

nlohmann::json value_to_json(const TimedValue& v);
TimedValue value_from_json(const nlohmann::json& j, ValueKind kind);

nlohmann::json forecast_to_json(const Forecast& f);
Forecast forecast_from_json(const nlohmann::json& j, ValueKind kind);

nlohmann::json entry_to_json(const Entry& e);
Entry entry_from_json(const nlohmann::json& j);

nlohmann::json category_to_json(const Category& c);
Category category_from_json(const nlohmann::json& j);

} // namespace nim::meta
