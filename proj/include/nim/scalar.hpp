#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "nim/time.hpp"

namespace nim {

/// Closed set of primitive kinds a field or entry can hold.
enum class ValueKind { Text, Number, Boolean, Timestamp };

std::string_view kind_name(ValueKind kind);
std::optional<ValueKind> kind_from_name(std::string_view name);

/// Typed scalar. The alternative index always agrees with the kind.
class Scalar {
public:
    using Storage = std::variant<std::string, double, bool, Instant>;

    Scalar() : v_(std::string{}) {}
    Scalar(std::string s) : v_(std::move(s)) {}
    Scalar(const char* s) : v_(std::string{s}) {}
    Scalar(double d) : v_(d) {}
    Scalar(int i) : v_(static_cast<double>(i)) {}
    Scalar(bool b) : v_(b) {}
    Scalar(Instant t) : v_(t) {}

    ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }

    const std::string& text() const { return std::get<std::string>(v_); }
    double number() const { return std::get<double>(v_); }
    bool boolean() const { return std::get<bool>(v_); }
    Instant timestamp() const { return std::get<Instant>(v_); }

    const Storage& storage() const { return v_; }

    /// Exact equality; numbers compare with `==` (no tolerance).
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }

private:
    Storage v_;
};

std::string to_string(const Scalar& s);

/// Wire form: Text -> string, Number -> number, Boolean -> bool, Timestamp -> ISO-8601 string.
nlohmann::json scalar_to_json(const Scalar& s);

/// Decodes a wire value as `kind`. Returns nullopt on kind mismatch.
std::optional<Scalar> scalar_from_json(const nlohmann::json& j, ValueKind kind);

/// Error categories surfaced to callers; the service maps them onto HTTP classes.
enum class ErrorCode { NotFound, Conflict, Invalid, Forbidden, OutOfRange, Corrupt };

class NimError : public std::runtime_error {
public:
    NimError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace nim
