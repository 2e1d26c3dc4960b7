#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace nim {

/// UTC instant with millisecond resolution. All timestamps in the engine use it.
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;

/// Injectable time source.
using Clock = std::function<Instant()>;

Clock system_clock();

constexpr Instant from_millis(std::int64_t ms) { return Instant{Duration{ms}}; }
constexpr std::int64_t to_millis(Instant t) { return t.time_since_epoch().count(); }

/// Formats as `YYYY-MM-DDTHH:MM:SS.mmmZ`.
std::string format_iso8601(Instant t);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff][Z|+00:00]`, also a bare date.
/// Offsets other than UTC are applied. Returns nullopt on malformed input.
std::optional<Instant> parse_iso8601(std::string_view text);

} // namespace nim
