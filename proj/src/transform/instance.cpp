#include "nim/transform/instance.hpp"

namespace nim::transform {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw NimError(ErrorCode::Invalid, msg); }

} // namespace

ConcreteInstance normalize(const ndf::TypeDef& type, ConcreteInstance inst) {
    if (inst.typeName.empty()) inst.typeName = type.qualifiedName;
    if (inst.typeName != type.qualifiedName)
        invalid("instance of '" + inst.typeName + "' given where '" + type.qualifiedName + "' is expected");

    for (const auto& [name, value] : inst.fields) {
        const ndf::FieldDef* f = type.find_field(name);
        if (!f) invalid("type '" + type.name + "' has no field '" + name + "'");
        if (value && value->kind() != f->fieldType)
            invalid("field '" + name + "' expects " + std::string(kind_name(f->fieldType)) + ", got " +
                    std::string(kind_name(value->kind())));
    }
    for (const auto& f : type.fields) inst.fields.try_emplace(f.name, std::nullopt);

    for (auto& [name, list] : inst.nested) {
        const ndf::TypeDef* n = type.find_nested(name);
        if (!n) invalid("type '" + type.name + "' has no nested type '" + name + "'");
        for (auto& child : list) child = normalize(*n, std::move(child));
    }
    for (const auto& n : type.nestedTypes) inst.nested.try_emplace(n.name);

    for (auto it = inst.meta.begin(); it != inst.meta.end();) {
        const ndf::FieldDef* f = type.find_field(it->first);
        if (!f) invalid("metadata for unknown field '" + it->first + "'");
        if (it->second.range) {
            if (f->fieldType != ValueKind::Number) invalid("range on non-Number field '" + it->first + "'");
            if (it->second.range->lower > it->second.range->upper)
                invalid("range of field '" + it->first + "' has lower > upper");
        }
        if (it->second.is_default())
            it = inst.meta.erase(it);
        else
            ++it;
    }
    return inst;
}

json entry_meta_to_json(const EntryMeta& m) {
    json j = json::object();
    if (!m.unit.empty()) j["unit"] = m.unit;
    if (!m.policy.agreedUsage.empty()) j["agreedUsage"] = m.policy.agreedUsage;
    if (!m.policy.allowedLocations.empty()) j["allowedLocations"] = m.policy.allowedLocations;
    if (m.policy.defaultExpiry) j["defaultExpiryMs"] = m.policy.defaultExpiry->count();
    if (m.range) j["range"] = {{"lower", m.range->lower}, {"upper", m.range->upper}};
    return j;
}

EntryMeta entry_meta_from_json(const json& j) {
    if (!j.is_object()) invalid("field metadata must be an object");
    EntryMeta m;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "unit")
                m.unit = value.get<std::string>();
            else if (key == "agreedUsage")
                m.policy.agreedUsage = value.get<std::vector<std::string>>();
            else if (key == "allowedLocations")
                m.policy.allowedLocations = value.get<std::vector<std::string>>();
            else if (key == "defaultExpiryMs")
                m.policy.defaultExpiry = Duration{value.get<std::int64_t>()};
            else if (key == "range")
                m.range = meta::ValueRange{value.at("lower").get<double>(), value.at("upper").get<double>()};
            else
                invalid("unknown metadata key '" + key + "'");
        }
    } catch (const json::exception& e) {
        invalid(std::string("malformed field metadata: ") + e.what());
    }
    return m;
}

ConcreteInstance instance_from_json(const ndf::TypeDef& type, const json& doc) {
    if (!doc.is_object()) invalid("instance of '" + type.name + "' must be a JSON object");
    ConcreteInstance inst;
    inst.typeName = type.qualifiedName;
    for (const auto& [key, value] : doc.items()) {
        if (key == "$id") {
            if (!value.is_string()) invalid("\"$id\" must be a string");
            inst.instanceId = value.get<std::string>();
        } else if (key == "$meta") {
            if (!value.is_object()) invalid("\"$meta\" must be an object");
            for (const auto& [field, m] : value.items()) inst.meta[field] = entry_meta_from_json(m);
        } else if (const ndf::FieldDef* f = type.find_field(key)) {
            if (value.is_null()) {
                inst.fields[key] = std::nullopt;
                continue;
            }
            auto s = scalar_from_json(value, f->fieldType);
            if (!s)
                invalid("field '" + key + "' expects " + std::string(kind_name(f->fieldType)) + ", got " +
                        value.dump());
            inst.fields[key] = std::move(*s);
        } else if (const ndf::TypeDef* n = type.find_nested(key)) {
            if (!value.is_array()) invalid("nested '" + key + "' must be an array of objects");
            auto& list = inst.nested[key];
            for (const auto& child : value) list.push_back(instance_from_json(*n, child));
        } else {
            invalid("type '" + type.name + "' has no field '" + key + "'");
        }
    }
    return normalize(type, std::move(inst));
}

json instance_to_json(const ConcreteInstance& inst) {
    json j = json::object();
    if (inst.instanceId) j["$id"] = *inst.instanceId;
    for (const auto& [name, value] : inst.fields) j[name] = value ? scalar_to_json(*value) : json(nullptr);
    for (const auto& [name, list] : inst.nested) {
        json arr = json::array();
        for (const auto& child : list) arr.push_back(instance_to_json(child));
        j[name] = std::move(arr);
    }
    if (!inst.meta.empty()) {
        json m = json::object();
        for (const auto& [field, em] : inst.meta) m[field] = entry_meta_to_json(em);
        j["$meta"] = std::move(m);
    }
    return j;
}

} // namespace nim::transform
