#pragma once

#include <string>
#include <vector>

#include "nim/scalar.hpp"

namespace nim::ndf {

struct SourcePos {
    int line = 1;
    int column = 1;
};

/// Primitive field declaration, e.g. `String roomName;`.
/// `String` declares a Text field.
struct FieldDef {
    std::string name;
    ValueKind fieldType = ValueKind::Text;
    SourcePos pos;

    friend bool operator==(const FieldDef& a, const FieldDef& b) {
        return a.name == b.name && a.fieldType == b.fieldType;
    }
};

/// A type definition. Nested definitions form a tree; `qualifiedName` is
/// package + enclosing-type path + name, dot separated.
struct TypeDef {
    std::string name;
    std::vector<FieldDef> fields;
    std::vector<TypeDef> nestedTypes;
    std::string qualifiedName;
    SourcePos pos;

    const FieldDef* find_field(std::string_view field) const;
    const TypeDef* find_nested(std::string_view type) const;

    friend bool operator==(const TypeDef& a, const TypeDef& b) {
        return a.name == b.name && a.fields == b.fields && a.nestedTypes == b.nestedTypes &&
               a.qualifiedName == b.qualifiedName;
    }
};

/// `qname.field` as written in a mapping.
struct FieldRef {
    std::string typeName;
    std::string field;
    SourcePos pos;

    std::string str() const { return typeName + "." + field; }

    friend bool operator==(const FieldRef& a, const FieldRef& b) {
        return a.typeName == b.typeName && a.field == b.field;
    }
};

/// `Target.field := A.f | B.g;`. Type names are kept as written; resolution
/// against the registry happens during checking.
struct MappingRule {
    std::string targetType;
    std::string targetField;
    std::vector<FieldRef> sources;
    SourcePos pos;

    friend bool operator==(const MappingRule& a, const MappingRule& b) {
        return a.targetType == b.targetType && a.targetField == b.targetField && a.sources == b.sources;
    }
};

/// Parsed form of one NDF file. Equality is structural: positions, source
/// text and model id do not take part.
struct NdfModel {
    std::string packageName;
    std::vector<TypeDef> types;
    std::vector<MappingRule> mappings;
    std::string sourceText;
    std::string modelId;

    friend bool operator==(const NdfModel& a, const NdfModel& b) {
        return a.packageName == b.packageName && a.types == b.types && a.mappings == b.mappings;
    }
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    int line = 1;
    int column = 1;

    std::string str() const;
};

bool has_errors(const std::vector<Diagnostic>& diags);

/// Visits every type of the model in pre-order (parents before children).
template <typename F>
void for_each_type(const std::vector<TypeDef>& types, F&& f) {
    for (const auto& t : types) {
        f(t);
        for_each_type(t.nestedTypes, f);
    }
}

/// Qualified name of `path` (already joined with dots) inside `packageName`.
inline std::string qualify(const std::string& packageName, const std::string& path) {
    return packageName.empty() ? path : packageName + "." + path;
}

} // namespace nim::ndf
