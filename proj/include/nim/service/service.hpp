#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nim/service/registry.hpp"
#include "nim/store/store.hpp"
#include "nim/transform/instance.hpp"

namespace nim::service {

/// Transport-neutral reply; the HTTP layer copies it onto the wire.
struct Response {
    int status = 200;
    nlohmann::json body;
    std::optional<std::string> text; // text/plain body instead of JSON

    static Response json(int status, nlohmann::json body) { return {status, std::move(body), std::nullopt}; }
    static Response error(int status, const std::string& message);
};

int http_status(ErrorCode code);

/// `X-NIM-Principals` value -> principal list (comma separated, trimmed).
std::vector<std::string> parse_principals(std::string_view header);

/// Extra validation run on every ingested document before it is stored.
/// Throw NimError to refuse the document.
using IngestHook =
    std::function<void(const ndf::TypeDef& type, const transform::ConcreteInstance& doc, const store::Store& store)>;

/// The per-model adapters, interpreted from the registry snapshot: every
/// request routes through the type's binding, so a model's endpoints answer
/// as soon as its registration is published.
class NimService {
public:
    NimService(store::Store& store, ModelRegistry& registry);

    void add_ingest_hook(IngestHook hook) { hooks_.push_back(std::move(hook)); }

    Response register_model(const std::string& ndfSource);
    Response list_models() const;
    Response get_model(const std::string& modelId) const;

    Response ingest(const std::string& type, const std::string& body);
    Response get_instances(const std::string& type, const std::vector<std::string>& principals,
                           std::optional<std::string> at) const;
    Response get_instance(const std::string& type, const std::string& instanceId,
                          const std::vector<std::string>& principals, std::optional<std::string> at) const;

    Response append_value(const std::string& type, const std::string& instanceId, const std::string& field,
                          const std::string& body);
    Response get_history(const std::string& type, const std::string& instanceId, const std::string& field,
                         std::optional<std::string> from, std::optional<std::string> to,
                         const std::vector<std::string>& principals, std::optional<std::string> at) const;
    Response post_forecast(const std::string& type, const std::string& instanceId, const std::string& field,
                           const std::string& body);
    Response get_forecasts(const std::string& type, const std::string& instanceId, const std::string& field,
                           std::optional<std::string> source, const std::vector<std::string>& principals) const;

    Response purge(std::optional<std::string> now);
    Response generic_components(const std::vector<std::string>& principals) const;

    store::Store& store() { return store_; }
    ModelRegistry& registry() { return registry_; }

private:
    store::Store& store_;
    ModelRegistry& registry_;
    std::vector<IngestHook> hooks_;
};

} // namespace nim::service
