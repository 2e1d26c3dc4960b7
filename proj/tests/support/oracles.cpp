#include "oracles.hpp"

#include <algorithm>
#include <cctype>

#include "nim/meta/serialize.hpp"

namespace nimtest::oracle {

using namespace nim;

bool expired(const TimedValue& v, Instant at) { return v.expiry.has_value() && !(*v.expiry > at); }

std::optional<TimedValue> current_value(const std::vector<TimedValue>& values, Instant at) {
    std::optional<TimedValue> best;
    for (const auto& v : values) {
        if (v.timestamp > at || expired(v, at)) continue;
        if (!best || v.timestamp > best->timestamp || (v.timestamp == best->timestamp && v.ingestSeq > best->ingestSeq))
            best = v;
    }
    return best;
}

std::vector<TimedValue> history(const std::vector<TimedValue>& values, Instant from, Instant to, Instant at) {
    std::vector<TimedValue> out;
    for (const auto& v : values)
        if (from <= v.timestamp && v.timestamp <= to && !expired(v, at)) out.push_back(v);
    // insertion sort keeps this independent of the library's ordering code
    for (std::size_t i = 1; i < out.size(); ++i)
        for (std::size_t j = i; j > 0; --j) {
            auto& a = out[j - 1];
            auto& b = out[j];
            if (a.timestamp > b.timestamp || (a.timestamp == b.timestamp && a.ingestSeq > b.ingestSeq))
                std::swap(a, b);
            else
                break;
        }
    return out;
}

bool may_read(const std::vector<std::string>& agreedUsage, const std::vector<std::string>& principals) {
    if (agreedUsage.empty()) return true;
    for (const auto& a : agreedUsage)
        for (const auto& p : principals)
            if (a == p) return true;
    return false;
}

bool may_store(const std::vector<std::string>& allowedLocations, const std::string& node) {
    if (allowedLocations.empty()) return true;
    for (const auto& l : allowedLocations)
        if (l == node) return true;
    return false;
}

std::optional<std::size_t> active_forecast(const std::vector<meta::Forecast>& forecasts, const std::string& source) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        if (forecasts[i].sourceId != source) continue;
        if (!best || !(forecasts[i].createdAt < forecasts[*best].createdAt)) best = i;
    }
    return best;
}

std::vector<meta::Category> roots_of(const nlohmann::json& snapshot) {
    std::vector<meta::Category> out;
    for (const auto& c : snapshot.at("instances")) out.push_back(meta::category_from_json(c));
    return out;
}

namespace {

meta::Category filtered(const meta::Category& c, const std::vector<std::string>& principals, Instant at) {
    meta::Category out = c;
    out.children.clear();
    for (const auto& child : c.children) {
        if (std::holds_alternative<meta::Category>(child.node)) {
            out.children.push_back(meta::Component{filtered(std::get<meta::Category>(child.node), principals, at)});
            continue;
        }
        meta::Entry e = std::get<meta::Entry>(child.node);
        if (!may_read(e.policy.agreedUsage, principals)) continue;
        std::vector<TimedValue> kept;
        for (const auto& v : e.values)
            if (!expired(v, at)) kept.push_back(v);
        e.values = kept;
        out.children.push_back(meta::Component{e});
    }
    return out;
}

void scan(const meta::Category& c, const std::string& type, const std::vector<std::string>& principals, Instant at,
          std::vector<meta::Category>& out) {
    if (c.sourceType == type) out.push_back(filtered(c, principals, at));
    for (const auto& child : c.children)
        if (std::holds_alternative<meta::Category>(child.node))
            scan(std::get<meta::Category>(child.node), type, principals, at, out);
}

const meta::Entry* entry_named(const meta::Category& c, const std::string& name) {
    for (const auto& child : c.children)
        if (std::holds_alternative<meta::Entry>(child.node) && std::get<meta::Entry>(child.node).name == name)
            return &std::get<meta::Entry>(child.node);
    return nullptr;
}

std::string lower(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

} // namespace

std::vector<meta::Category> query(const std::vector<meta::Category>& roots, const std::string& type,
                                  const std::vector<std::string>& principals, Instant at) {
    std::vector<meta::Category> out;
    for (const auto& r : roots) scan(r, type, principals, at, out);
    return out;
}

std::map<std::string, std::vector<std::pair<std::string, std::string>>> substitute(const RuleSet& rules,
                                                                                   const std::string& target) {
    auto current = rules.at(target);
    // fixpoint: replace (virtual type, field) by that field's own alternatives
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& [field, alts] : current) {
            std::vector<std::pair<std::string, std::string>> next;
            for (const auto& [t, f] : alts) {
                auto it = rules.find(t);
                if (it == rules.end()) {
                    next.emplace_back(t, f);
                } else {
                    changed = true;
                    for (const auto& alt : it->second.at(f)) next.push_back(alt);
                }
            }
            alts = next;
        }
    }
    return current;
}

std::vector<transform::ConcreteInstance> resolve(
    const std::vector<meta::Category>& roots, const std::string& targetType, const std::vector<std::string>& targetFields,
    const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& rulesByField,
    const std::vector<std::string>& sourceOrder, const std::vector<std::string>& principals, Instant at) {
    std::vector<transform::ConcreteInstance> out;
    for (const auto& source : sourceOrder) {
        std::map<std::string, std::string> fieldMap;
        for (const auto& tf : targetFields) {
            auto it = rulesByField.find(tf);
            if (it == rulesByField.end()) continue;
            for (const auto& [t, f] : it->second)
                if (t == source && !fieldMap.count(tf)) fieldMap[tf] = f;
        }
        if (fieldMap.size() != targetFields.size()) continue;
        std::vector<const meta::Category*> found;
        std::vector<const meta::Category*> stack;
        for (const auto& r : roots) {
            // explicit pre-order
            stack.push_back(&r);
            while (!stack.empty()) {
                const meta::Category* c = stack.back();
                stack.pop_back();
                if (c->sourceType == source) found.push_back(c);
                for (auto it = c->children.rbegin(); it != c->children.rend(); ++it)
                    if (std::holds_alternative<meta::Category>(it->node)) stack.push_back(&std::get<meta::Category>(it->node));
            }
        }
        for (const meta::Category* c : found) {
            transform::ConcreteInstance doc;
            doc.typeName = targetType;
            if (!c->instanceId.empty()) doc.instanceId = c->instanceId;
            for (const auto& [tf, sf] : fieldMap) {
                const meta::Entry* e = entry_named(*c, sf);
                if (!e || !may_read(e->policy.agreedUsage, principals)) continue;
                auto cur = current_value(e->values, at);
                doc.fields[tf] = cur ? std::optional<Scalar>(cur->value) : std::nullopt;
            }
            out.push_back(std::move(doc));
        }
    }
    return out;
}

Shape expected_shape(const ndf::TypeDef& type, const transform::ConcreteInstance& inst) {
    Shape s;
    s.name = lower(type.name);
    for (const auto& f : type.fields) s.entries.push_back(f.name);
    for (const auto& n : type.nestedTypes) {
        Shape container;
        container.name = lower(n.name);
        auto it = inst.nested.find(n.name);
        if (it != inst.nested.end()) {
            for (std::size_t i = 0; i < it->second.size(); ++i) {
                Shape child = expected_shape(n, it->second[i]);
                child.name = std::to_string(i);
                container.children.push_back(child);
            }
        }
        s.children.push_back(container);
    }
    std::sort(s.entries.begin(), s.entries.end());
    return s;
}

Shape actual_shape(const meta::Category& c) {
    Shape s;
    s.name = c.name;
    for (const auto& child : c.children) {
        if (std::holds_alternative<meta::Entry>(child.node))
            s.entries.push_back(std::get<meta::Entry>(child.node).name);
        else
            s.children.push_back(actual_shape(std::get<meta::Category>(child.node)));
    }
    std::sort(s.entries.begin(), s.entries.end());
    return s;
}

} // namespace nimtest::oracle
