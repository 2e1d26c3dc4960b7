#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nim/service/registry.hpp"
#include "nim/service/service.hpp"
#include "nim/transform/instance.hpp"

namespace nim::builtin {

inline constexpr std::string_view kPackage = "cooperate.nim";
inline constexpr std::string_view kGridConnectionType = "cooperate.nim.Neighbourhood.EnergyGridConnection";

struct BuiltinFile {
    std::string_view name;
    std::string_view source;
};

/// The shipped model files in registration order.
std::span<const BuiltinFile> builtin_files();

/// Qualified names of the energy element kinds a grid connection may link.
std::span<const std::string_view> energy_element_types();

/// Registers every builtin file in order. On a registry that already holds
/// them each result is a CC1 rejection and nothing changes.
std::vector<service::RegistrationResult> load_builtins(service::ModelRegistry& registry);

/// Returns the type of an energy element with that instance id, if any.
using ElementLookup = std::function<std::optional<std::string>(const std::string& instanceId)>;

/// nullopt when the connection links exactly two distinct, existing energy
/// elements; otherwise the violation.
std::optional<std::string> validate_grid_connection(const transform::ConcreteInstance& connection,
                                                    const ElementLookup& lookup);

/// Ingest hook: checks every grid connection inside an ingested document.
/// Elements may live in the store or be declared (with `$id`) in the same
/// document. Throws NimError(Invalid) on the first violation.
void check_document(const ndf::TypeDef& type, const transform::ConcreteInstance& doc, const store::Store& store);

/// Adds check_document to the service's ingest hooks.
void install_hooks(service::NimService& service);

} // namespace nim::builtin
