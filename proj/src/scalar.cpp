#include "nim/scalar.hpp"

#include <cmath>
#include <sstream>

namespace nim {

std::string_view kind_name(ValueKind kind) {
    switch (kind) {
    case ValueKind::Text: return "Text";
    case ValueKind::Number: return "Number";
    case ValueKind::Boolean: return "Boolean";
    case ValueKind::Timestamp: return "Timestamp";
    }
    return "?";
}

std::optional<ValueKind> kind_from_name(std::string_view name) {
    if (name == "Text") return ValueKind::Text;
    if (name == "Number") return ValueKind::Number;
    if (name == "Boolean") return ValueKind::Boolean;
    if (name == "Timestamp") return ValueKind::Timestamp;
    return std::nullopt;
}

std::string to_string(const Scalar& s) {
    switch (s.kind()) {
    case ValueKind::Text: return s.text();
    case ValueKind::Number: {
        std::ostringstream os;
        os.precision(15);
        os << s.number();
        return os.str();
    }
    case ValueKind::Boolean: return s.boolean() ? "true" : "false";
    case ValueKind::Timestamp: return format_iso8601(s.timestamp());
    }
    return {};
}

nlohmann::json scalar_to_json(const Scalar& s) {
    switch (s.kind()) {
    case ValueKind::Text: return s.text();
    case ValueKind::Number: return s.number();
    case ValueKind::Boolean: return s.boolean();
    case ValueKind::Timestamp: return format_iso8601(s.timestamp());
    }
    return nullptr;
}

std::optional<Scalar> scalar_from_json(const nlohmann::json& j, ValueKind kind) {
    switch (kind) {
    case ValueKind::Text:
        if (j.is_string()) return Scalar{j.get<std::string>()};
        break;
    case ValueKind::Number:
        if (j.is_number()) {
            const double d = j.get<double>();
            if (std::isfinite(d)) return Scalar{d};
        }
        break;
    case ValueKind::Boolean:
        if (j.is_boolean()) return Scalar{j.get<bool>()};
        break;
    case ValueKind::Timestamp:
        if (j.is_string()) {
            if (auto t = parse_iso8601(j.get<std::string>())) return Scalar{*t};
        }
        break;
    }
    return std::nullopt;
}

} // namespace nim
