#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nim/scalar.hpp"
#include "nim/time.hpp"

namespace nim::meta {

/// Bounds of valid values for a Number entry. lower <= upper.
struct ValueRange {
    double lower = 0;
    double upper = 0;

    friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

/// Entry-level privacy metadata. Empty lists mean unrestricted.
struct AccessPolicy {
    std::vector<std::string> agreedUsage;      // principals (roles, users, services) allowed to read
    std::vector<std::string> allowedLocations; // location codes where values may be stored
    std::optional<Duration> defaultExpiry;     // applied to values ingested without an expiry

    friend bool operator==(const AccessPolicy&, const AccessPolicy&) = default;
};

struct TimedValue {
    Scalar value;
    Instant timestamp;
    std::optional<Instant> expiry; // >= timestamp when present
    std::uint64_t ingestSeq = 0;

    bool expired_at(Instant at) const { return expiry && *expiry <= at; }

    friend bool operator==(const TimedValue&, const TimedValue&) = default;
};

struct ForecastPoint {
    Instant time;
    Scalar value;

    friend bool operator==(const ForecastPoint&, const ForecastPoint&) = default;
};

/// One prediction series from one source. Points strictly increase in time.
struct Forecast {
    std::string sourceId;
    std::vector<ForecastPoint> points;
    Instant createdAt;

    friend bool operator==(const Forecast&, const Forecast&) = default;
};

/// Leaf of the composite: metadata plus its values and forecasts.
/// `values` is kept sorted by (timestamp, ingestSeq).
struct Entry {
    std::string name;
    std::string unit;
    AccessPolicy policy;
    std::vector<TimedValue> values;
    std::vector<Forecast> forecasts;
    std::optional<ValueRange> range; // Number entries only
    ValueKind valueKind = ValueKind::Text;

    /// Inserts keeping the (timestamp, ingestSeq) order.
    void insert(TimedValue v);

    friend bool operator==(const Entry&, const Entry&) = default;
};

struct Component;

/// Container node of the composite. Children form a tree with unique names;
/// `references` are free cross-links to other categories by instance id.
struct Category {
    std::string name;
    std::vector<Component> children;
    std::vector<std::string> references;
    std::string instanceId;
    std::string sourceType; // qualified NDF type that produced it, empty when hand-built

    Component* find_child(std::string_view child);
    const Component* find_child(std::string_view child) const;
    Entry* find_entry(std::string_view child);
    const Entry* find_entry(std::string_view child) const;
    Category* find_category(std::string_view child);
    const Category* find_category(std::string_view child) const;

    /// Appends a child; throws NimError(Conflict) when the name is taken.
    Component& add(Component child);

    friend bool operator==(const Category& a, const Category& b);
};

struct Component {
    std::variant<Category, Entry> node;

    Component(Category c) : node(std::move(c)) {}
    Component(Entry e) : node(std::move(e)) {}

    bool is_category() const { return std::holds_alternative<Category>(node); }
    bool is_entry() const { return std::holds_alternative<Entry>(node); }
    Category& category() { return std::get<Category>(node); }
    const Category& category() const { return std::get<Category>(node); }
    Entry& entry() { return std::get<Entry>(node); }
    const Entry& entry() const { return std::get<Entry>(node); }
    const std::string& name() const;

    friend bool operator==(const Component& a, const Component& b) { return a.node == b.node; }
};

inline bool operator==(const Category& a, const Category& b) {
    return a.name == b.name && a.children == b.children && a.references == b.references &&
           a.instanceId == b.instanceId && a.sourceType == b.sourceType;
}

/// Depth-first pre-order walk over a category and everything below it.
template <typename OnCategory, typename OnEntry>
void walk(const Category& root, OnCategory&& onCategory, OnEntry&& onEntry) {
    onCategory(root);
    for (const auto& child : root.children) {
        if (child.is_category())
            walk(child.category(), onCategory, onEntry);
        else
            onEntry(child.entry());
    }
}

} // namespace nim::meta
