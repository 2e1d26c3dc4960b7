#include "nim/ndf/printer.hpp"

#include <sstream>

namespace nim::ndf {

namespace {

std::string_view keyword(ValueKind kind) {
    switch (kind) {
    case ValueKind::Text: return "String";
    case ValueKind::Number: return "Number";
    case ValueKind::Boolean: return "Boolean";
    case ValueKind::Timestamp: return "Timestamp";
    }
    return "String";
}

void print_type(std::ostream& os, const TypeDef& t, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    os << pad << t.name << " {\n";
    for (const auto& f : t.fields) os << pad << "  " << keyword(f.fieldType) << ' ' << f.name << ";\n";
    for (const auto& n : t.nestedTypes) print_type(os, n, depth + 1);
    os << pad << "}\n";
}

} // namespace

std::string pretty_print(const NdfModel& model) {
    std::ostringstream os;
    bool needs_gap = false;
    if (!model.packageName.empty()) {
        os << "package " << model.packageName << ";\n";
        needs_gap = true;
    }
    for (const auto& t : model.types) {
        if (needs_gap) os << '\n';
        print_type(os, t, 0);
        needs_gap = true;
    }
    if (!model.mappings.empty() && needs_gap) os << '\n';
    for (const auto& r : model.mappings) {
        os << r.targetType << '.' << r.targetField << " :=";
        for (std::size_t i = 0; i < r.sources.size(); ++i) os << (i ? " | " : " ") << r.sources[i].str();
        os << ";\n";
    }
    return os.str();
}

} // namespace nim::ndf
