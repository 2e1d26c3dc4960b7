#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nim/meta/model.hpp"

namespace nim::meta {

enum class Decision { Allow, Deny };

/// Value with the greatest timestamp <= `at` that has not expired at `at`;
/// equal timestamps resolve to the latest ingest.
std::optional<TimedValue> current_value(const Entry& entry, Instant at);

/// Values with from <= timestamp <= to that are not expired at `at`, ascending.
/// Throws NimError(OutOfRange) when from > to.
std::vector<TimedValue> history(const Entry& entry, Instant from, Instant to, Instant at);

/// Allow iff agreedUsage is empty or shares a principal with `principals`.
Decision check_access(const AccessPolicy& policy, std::span<const std::string> principals);

/// Allow iff allowedLocations is empty or contains `nodeLocation`.
Decision check_storage_location(const AccessPolicy& policy, std::string_view nodeLocation);

enum class RangeCheck { Ok, Violation };

/// Throws NimError(Invalid) when the candidate's kind differs from the entry's.
RangeCheck validate_range(const Entry& entry, const Scalar& candidate);

/// Latest-created forecast of one source, or nullptr.
const Forecast* active_forecast(const Entry& entry, std::string_view sourceId);

/// Throws NimError(Invalid) unless points are non-empty, strictly increasing
/// in time, of `kind`, and the source id is non-empty.
void validate_forecast(const Forecast& forecast, ValueKind kind);

} // namespace nim::meta
