#include "nim/builtin/builtins.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "builtin_sources.inc"

namespace nim::builtin {

namespace {

constexpr std::array<std::string_view, 4> kEnergyTypes = {
    "cooperate.nim.Neighbourhood.PublicLighting",
    "cooperate.nim.Neighbourhood.Building",
    "cooperate.nim.Neighbourhood.TechnicalSystem",
    "cooperate.nim.Neighbourhood.ElectricVehicle",
};

bool is_energy_type(std::string_view t) {
    return std::find(kEnergyTypes.begin(), kEnergyTypes.end(), t) != kEnergyTypes.end();
}

template <typename F>
void walk(const transform::ConcreteInstance& inst, F&& f) {
    f(inst);
    for (const auto& [_, list] : inst.nested)
        for (const auto& child : list) walk(child, f);
}

} // namespace

std::span<const BuiltinFile> builtin_files() { return kBuiltinFiles; }

std::span<const std::string_view> energy_element_types() { return kEnergyTypes; }

std::vector<service::RegistrationResult> load_builtins(service::ModelRegistry& registry) {
    std::vector<service::RegistrationResult> out;
    for (const auto& f : kBuiltinFiles) out.push_back(registry.register_model(f.source));
    return out;
}

std::optional<std::string> validate_grid_connection(const transform::ConcreteInstance& connection,
                                                    const ElementLookup& lookup) {
    std::vector<std::string> ids;
    if (auto it = connection.nested.find("Link"); it != connection.nested.end()) {
        for (const auto& link : it->second) {
            auto f = link.fields.find("elementId");
            if (f == link.fields.end() || !f->second)
                return std::string("grid connection link without an elementId");
            ids.push_back(f->second->text());
        }
    }
    if (ids.size() != 2)
        return "a grid connection links exactly two energy elements, got " + std::to_string(ids.size());
    if (ids[0] == ids[1]) return "grid connection links '" + ids[0] + "' to itself";
    for (const auto& id : ids) {
        auto type = lookup(id);
        if (!type) return "grid connection references unknown instance '" + id + "'";
        if (!is_energy_type(*type))
            return "grid connection references '" + id + "', which is a " + *type + ", not an energy element";
    }
    return std::nullopt;
}

void check_document(const ndf::TypeDef&, const transform::ConcreteInstance& doc, const store::Store& store) {
    std::map<std::string, std::string> declared;
    walk(doc, [&](const transform::ConcreteInstance& i) {
        if (i.instanceId) declared.emplace(*i.instanceId, i.typeName);
    });
    const ElementLookup lookup = [&](const std::string& id) -> std::optional<std::string> {
        if (auto it = declared.find(id); it != declared.end()) return it->second;
        if (auto cat = store.get_instance(id, {}, std::nullopt)) return cat->sourceType;
        return std::nullopt;
    };
    walk(doc, [&](const transform::ConcreteInstance& i) {
        if (i.typeName != kGridConnectionType) return;
        if (auto violation = validate_grid_connection(i, lookup)) throw NimError(ErrorCode::Invalid, *violation);
    });
}

void install_hooks(service::NimService& service) { service.add_ingest_hook(check_document); }

} // namespace nim::builtin
