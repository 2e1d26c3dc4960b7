#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nim/ndf/ast.hpp"
#include "nim/ndf/checker.hpp"
#include "nim/ndf/symbols.hpp"
#include "nim/store/store.hpp"
#include "nim/transform/transform.hpp"

namespace nim::service {

struct Endpoint {
    std::string method;
    std::string path;

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

/// Access surface of one registered model.
struct AdapterDescriptor {
    std::string modelId;
    std::vector<std::string> qualifiedTypes;
    std::vector<transform::MappingPlan> mappingPlans;
    std::vector<Endpoint> endpoints;
    Instant registeredAt;
};

nlohmann::json descriptor_to_json(const AdapterDescriptor& d);

enum class RegistrationStatus { Accepted, Rejected };

struct RegistrationResult {
    RegistrationStatus status = RegistrationStatus::Rejected;
    std::optional<std::string> modelId;
    std::vector<ndf::Diagnostic> diagnostics;

    bool accepted() const { return status == RegistrationStatus::Accepted; }
};

struct RegisteredModel {
    ndf::NdfModel model;
    std::vector<transform::MappingPlan> plans;
    AdapterDescriptor descriptor;
};

/// Per-type view used to route requests.
struct TypeBinding {
    const ndf::TypeDef* def = nullptr;
    std::shared_ptr<const RegisteredModel> model;
    const transform::MappingPlan* plan = nullptr; // set iff the type is virtual

    bool is_virtual() const { return plan != nullptr; }
};

/// Immutable published state. Readers hold a shared_ptr to one snapshot for
/// the whole request; registrations publish a new one.
struct RegistrySnapshot {
    std::vector<std::shared_ptr<const RegisteredModel>> models; // registration order
    ndf::SymbolTable symbols;
    std::map<std::string, TypeBinding> types;

    const TypeBinding* find(const std::string& qualifiedType) const;
    const transform::MappingPlan* plan(const std::string& qualifiedType) const;
};

/// Output of the shared validator: everything registration needs, computed
/// without touching any state.
struct PreparedModel {
    std::optional<ndf::NdfModel> model;
    ndf::Analysis analysis;
    std::vector<transform::MappingPlan> plans;
    std::vector<ndf::Diagnostic> diagnostics; // parse + context conditions + plan warnings

    bool ok() const { return model.has_value() && !ndf::has_errors(diagnostics); }
};

/// parse -> context conditions -> plans, against `base`. Used by both the
/// server and the offline validator.
PreparedModel prepare_model(std::string_view source, const RegistrySnapshot& base, const std::string& modelId);

/// Endpoints a registered type exposes.
std::vector<Endpoint> endpoints_for(const std::string& qualifiedType, bool isVirtual);

class ModelRegistry {
public:
    /// Rebuilds the registry from models already recorded in `store`.
    explicit ModelRegistry(store::Store& store);

    /// Validates and, on success, journals and atomically publishes the model.
    /// A rejected model leaves the registry and the store untouched.
    RegistrationResult register_model(std::string_view source);

    std::shared_ptr<const RegistrySnapshot> snapshot() const;
    std::vector<AdapterDescriptor> list_models() const;

    /// Problems met while restoring persisted models.
    const std::vector<std::string>& restore_warnings() const { return restoreWarnings_; }

private:
    std::shared_ptr<RegistrySnapshot> with_model(const RegistrySnapshot& base, PreparedModel prepared,
                                                 const std::string& modelId, Instant at) const;
    void publish(std::shared_ptr<const RegistrySnapshot> next);

    store::Store& store_;
    std::mutex writeMutex_;
    mutable std::mutex publishMutex_;
    std::shared_ptr<const RegistrySnapshot> current_;
    std::vector<std::string> restoreWarnings_;
};

} // namespace nim::service
