#include "nim/ndf/checker.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <tuple>

namespace nim::ndf {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

Diagnostic error(std::string code, std::string message, SourcePos pos) {
    return {Severity::Error, std::move(code), std::move(message), pos.line, pos.column};
}

struct FieldInfo {
    bool found = false;
    bool isNested = false;
    ValueKind kind = ValueKind::Text;
};

class Checker {
public:
    Checker(const NdfModel& model, const SymbolTable& registry)
        : model_(model), registry_(registry), local_(model) {}

    Analysis run() {
        check_type_names();
        check_fields();
        check_mappings();
        check_cycles();
        check_coverage();
        std::stable_sort(out_.diagnostics.begin(), out_.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return std::tie(a.line, a.column) < std::tie(b.line, b.column);
        });
        return std::move(out_);
    }

private:
    void add(Diagnostic d) { out_.diagnostics.push_back(std::move(d)); }

    // CC1
    void check_type_names() {
        std::set<std::string> seen;
        for (const TypeDef* t : local_.preorder()) {
            if (!seen.insert(t->qualifiedName).second) {
                add(error("CC1", "type '" + t->qualifiedName + "' is defined more than once in this model", t->pos));
            } else if (const TypeSymbol* s = registry_.find(t->qualifiedName)) {
                add(error("CC1",
                          "type '" + t->qualifiedName + "' is already registered" +
                              (s->modelId.empty() ? std::string{} : " by model " + s->modelId),
                          t->pos));
            }
        }
    }

    // CC2
    void check_fields() {
        for (const TypeDef* t : local_.preorder()) {
            // nested types become child categories named in lowercase, so
            // they must not collide with field entries or with each other
            std::set<std::string> names;
            for (const auto& n : t->nestedTypes) {
                if (!names.insert(lowercase(n.name)).second)
                    add(error("CC2", "nested type '" + n.name + "' differs from a sibling only in case", n.pos));
                names.insert(n.name);
            }
            std::set<std::string> fields;
            for (const auto& f : t->fields) {
                if (!fields.insert(f.name).second)
                    add(error("CC2", "duplicate field '" + f.name + "' in type '" + t->name + "'", f.pos));
                else if (names.count(f.name))
                    add(error("CC2", "field '" + f.name + "' clashes with a nested type of '" + t->name + "'", f.pos));
            }
        }
    }

    FieldInfo field_of(const std::string& qualifiedType, const std::string& field) const {
        FieldInfo info;
        if (const TypeDef* t = local_.find_qualified(qualifiedType)) {
            if (const FieldDef* f = t->find_field(field)) return {true, false, f->fieldType};
            if (t->find_nested(field)) info.isNested = true;
            return info;
        }
        if (const TypeSymbol* s = registry_.find(qualifiedType)) {
            for (const auto& f : s->fields)
                if (f.name == field) return {true, false, f.fieldType};
            if (std::find(s->nestedTypes.begin(), s->nestedTypes.end(), field) != s->nestedTypes.end())
                info.isNested = true;
        }
        return info;
    }

    // CC3, CC4, CC5
    void check_mappings() {
        std::set<std::pair<std::string, std::string>> targets;
        for (const auto& rule : model_.mappings) {
            bool rule_ok = true;
            ResolvedRule resolved;
            resolved.pos = rule.pos;

            const TypeDef* target = local_.find(rule.targetType);
            const FieldDef* targetField = nullptr;
            if (!target) {
                add(error("CC3", "mapping target type '" + rule.targetType + "' is not defined in this model", rule.pos));
                rule_ok = false;
            } else if (!(targetField = target->find_field(rule.targetField))) {
                add(error("CC3", "type '" + target->name + "' has no field '" + rule.targetField + "'", rule.pos));
                rule_ok = false;
            } else if (!targets.emplace(target->qualifiedName, rule.targetField).second) {
                add(error("CC3", "field '" + rule.targetType + "." + rule.targetField + "' is mapped more than once",
                          rule.pos));
                rule_ok = false;
            }
            if (target) {
                resolved.targetType = target->qualifiedName;
                resolved.targetField = rule.targetField;
            }

            std::set<std::string> sourceTypes;
            for (const auto& src : rule.sources) {
                const NameResolution r = resolve_name(src.typeName, model_, local_, registry_);
                if (r.status == ResolveStatus::Ambiguous) {
                    std::string list;
                    for (const auto& c : r.candidates) list += (list.empty() ? "" : ", ") + c;
                    add(error("CC4", "type name '" + src.typeName + "' is ambiguous (" + list + ")", src.pos));
                    rule_ok = false;
                    continue;
                }
                if (!r.ok()) {
                    add(error("CC4", "unknown source type '" + src.typeName + "'", src.pos));
                    rule_ok = false;
                    continue;
                }
                const FieldInfo f = field_of(r.qualifiedName, src.field);
                if (!f.found) {
                    add(error("CC4",
                              f.isNested ? "'" + src.str() + "' names a nested type, not a field"
                                         : "type '" + r.qualifiedName + "' has no field '" + src.field + "'",
                              src.pos));
                    rule_ok = false;
                    continue;
                }
                if (!sourceTypes.insert(r.qualifiedName).second) {
                    add(error("CC4", "source type '" + r.qualifiedName + "' appears more than once in this rule",
                              src.pos));
                    rule_ok = false;
                    continue;
                }
                if (targetField && f.kind != targetField->fieldType) {
                    add(error("CC5",
                              "'" + src.str() + "' is " + std::string(kind_name(f.kind)) + " but '" +
                                  rule.targetType + "." + rule.targetField + "' is " +
                                  std::string(kind_name(targetField->fieldType)),
                              src.pos));
                    rule_ok = false;
                }
                resolved.sources.push_back({r.qualifiedName, src.field});
            }

            if (target) {
                auto& srcs = out_.virtualSources[target->qualifiedName];
                for (const auto& s : resolved.sources)
                    if (std::find(srcs.begin(), srcs.end(), s.type) == srcs.end()) srcs.push_back(s.type);
            }
            if (rule_ok) out_.rules.push_back(std::move(resolved));
        }
    }

    // CC6: edges target -> source, including registered virtual types.
    void check_cycles() {
        std::map<std::string, std::vector<std::pair<std::string, SourcePos>>> edges;
        for (const auto& [name, sym] : registry_.all())
            for (const auto& src : sym.mappingSources) edges[name].push_back({src, {}});
        for (const auto& rule : model_.mappings) {
            const TypeDef* target = local_.find(rule.targetType);
            if (!target) continue;
            for (const auto& src : rule.sources) {
                const NameResolution r = resolve_name(src.typeName, model_, local_, registry_);
                if (r.ok()) edges[target->qualifiedName].push_back({r.qualifiedName, src.pos});
            }
        }

        enum class Mark { White, Grey, Black };
        std::map<std::string, Mark> mark;
        std::set<std::string> reported;
        std::function<void(const std::string&)> visit = [&](const std::string& node) {
            mark[node] = Mark::Grey;
            for (const auto& [next, pos] : edges[node]) {
                const Mark m = mark[next];
                if (m == Mark::Grey) {
                    if (reported.insert(node + "->" + next).second)
                        add(error("CC6", "mapping of '" + node + "' from '" + next + "' closes a dependency cycle", pos));
                } else if (m == Mark::White) {
                    visit(next);
                }
            }
            mark[node] = Mark::Black;
        };
        for (const auto& rule : model_.mappings) {
            const TypeDef* target = local_.find(rule.targetType);
            if (target && mark[target->qualifiedName] == Mark::White) visit(target->qualifiedName);
        }
    }

    // CC7
    void check_coverage() {
        for (const auto& [qname, _] : out_.virtualSources) {
            const TypeDef* t = local_.find_qualified(qname);
            if (!t) continue;
            if (!local_.is_top_level(t))
                add(error("CC7", "mapping target '" + t->name + "' must be a top-level type", t->pos));
            if (!t->nestedTypes.empty())
                add(error("CC7", "mapping target '" + t->name + "' cannot contain nested types", t->pos));
            for (const auto& f : t->fields) {
                const bool covered = std::any_of(model_.mappings.begin(), model_.mappings.end(), [&](const MappingRule& r) {
                    const TypeDef* rt = local_.find(r.targetType);
                    return rt == t && r.targetField == f.name;
                });
                if (!covered)
                    add(error("CC7", "field '" + t->name + "." + f.name + "' of mapped type has no mapping rule", f.pos));
            }
        }
    }

    const NdfModel& model_;
    const SymbolTable& registry_;
    LocalTypes local_;
    Analysis out_;
};

} // namespace

Analysis analyze(const NdfModel& model, const SymbolTable& registry) { return Checker(model, registry).run(); }

std::vector<Diagnostic> check_context_conditions(const NdfModel& model, const SymbolTable& registry) {
    return analyze(model, registry).diagnostics;
}

} // namespace nim::ndf
