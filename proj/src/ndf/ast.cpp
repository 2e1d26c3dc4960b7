#include "nim/ndf/ast.hpp"

#include <algorithm>

namespace nim::ndf {

const FieldDef* TypeDef::find_field(std::string_view field) const {
    auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldDef& f) { return f.name == field; });
    return it == fields.end() ? nullptr : &*it;
}

const TypeDef* TypeDef::find_nested(std::string_view type) const {
    auto it = std::find_if(nestedTypes.begin(), nestedTypes.end(), [&](const TypeDef& t) { return t.name == type; });
    return it == nestedTypes.end() ? nullptr : &*it;
}

std::string Diagnostic::str() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           (severity == Severity::Error ? "error" : "warning") + " [" + code + "] " + message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

} // namespace nim::ndf
