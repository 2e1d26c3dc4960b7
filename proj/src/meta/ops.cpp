#include "nim/meta/ops.hpp"

#include <algorithm>

namespace nim::meta {

std::optional<TimedValue> current_value(const Entry& entry, Instant at) {
    const auto& vs = entry.values;
    auto end = std::upper_bound(vs.begin(), vs.end(), at,
                                [](Instant t, const TimedValue& v) { return t < v.timestamp; });
    for (auto it = std::make_reverse_iterator(end); it != vs.rend(); ++it)
        if (!it->expired_at(at)) return *it;
    return std::nullopt;
}

std::vector<TimedValue> history(const Entry& entry, Instant from, Instant to, Instant at) {
    if (from > to) throw NimError(ErrorCode::OutOfRange, "history range start is after its end");
    const auto& vs = entry.values;
    auto lo = std::lower_bound(vs.begin(), vs.end(), from,
                               [](const TimedValue& v, Instant t) { return v.timestamp < t; });
    auto hi = std::upper_bound(lo, vs.end(), to, [](Instant t, const TimedValue& v) { return t < v.timestamp; });
    std::vector<TimedValue> out;
    std::copy_if(lo, hi, std::back_inserter(out), [&](const TimedValue& v) { return !v.expired_at(at); });
    return out;
}

Decision check_access(const AccessPolicy& policy, std::span<const std::string> principals) {
    if (policy.agreedUsage.empty()) return Decision::Allow;
    for (const auto& p : principals)
        if (std::find(policy.agreedUsage.begin(), policy.agreedUsage.end(), p) != policy.agreedUsage.end())
            return Decision::Allow;
    return Decision::Deny;
}

Decision check_storage_location(const AccessPolicy& policy, std::string_view nodeLocation) {
    const auto& locs = policy.allowedLocations;
    if (locs.empty() || std::find(locs.begin(), locs.end(), nodeLocation) != locs.end()) return Decision::Allow;
    return Decision::Deny;
}

RangeCheck validate_range(const Entry& entry, const Scalar& candidate) {
    if (candidate.kind() != entry.valueKind)
        throw NimError(ErrorCode::Invalid, "entry '" + entry.name + "' holds " + std::string(kind_name(entry.valueKind)) +
                                               " values, got " + std::string(kind_name(candidate.kind())));
    if (!entry.range || candidate.kind() != ValueKind::Number) return RangeCheck::Ok;
    const double v = candidate.number();
    return entry.range->lower <= v && v <= entry.range->upper ? RangeCheck::Ok : RangeCheck::Violation;
}

const Forecast* active_forecast(const Entry& entry, std::string_view sourceId) {
    const Forecast* best = nullptr;
    for (const auto& f : entry.forecasts)
        if (f.sourceId == sourceId && (!best || f.createdAt >= best->createdAt)) best = &f;
    return best;
}

void validate_forecast(const Forecast& forecast, ValueKind kind) {
    if (forecast.sourceId.empty()) throw NimError(ErrorCode::Invalid, "forecast needs a source identifier");
    if (forecast.points.empty()) throw NimError(ErrorCode::Invalid, "forecast has no points");
    for (std::size_t i = 0; i < forecast.points.size(); ++i) {
        if (forecast.points[i].value.kind() != kind)
            throw NimError(ErrorCode::Invalid, "forecast point " + std::to_string(i) + " is not " +
                                                   std::string(kind_name(kind)));
        if (i > 0 && !(forecast.points[i - 1].time < forecast.points[i].time))
            throw NimError(ErrorCode::Invalid, "forecast points must be strictly increasing in time");
    }
}

} // namespace nim::meta
