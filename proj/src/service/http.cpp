#include "nim/service/http.hpp"

#include <stdexcept>

#include <httplib.h>

namespace nim::service {

namespace {

std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
}

std::vector<std::string> principals(const httplib::Request& req) {
    return parse_principals(req.get_header_value("X-NIM-Principals"));
}

void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    if (r.text)
        res.set_content(*r.text, "text/plain; charset=utf-8");
    else
        res.set_content(r.body.dump(), "application/json");
}

} // namespace

struct HttpServer::Impl {
    NimService& service;
    httplib::Server server;

    explicit Impl(NimService& s) : service(s) { routes(); }

    void routes() {
        const std::string type = R"(/v1/types/([^/]+)/instances)";
        const std::string entry = type + R"(/([^/]+)/entries/([^/]+))";

        server.Post("/v1/models", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.register_model(req.body));
        });
        server.Get("/v1/models", [this](const httplib::Request&, httplib::Response& res) {
            send(res, service.list_models());
        });
        server.Get(R"(/v1/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.get_model(req.matches[1]));
        });
        server.Post(type, [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.ingest(req.matches[1], req.body));
        });
        server.Get(type, [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.get_instances(req.matches[1], principals(req), param(req, "at")));
        });
        server.Get(type + R"(/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.get_instance(req.matches[1], req.matches[2], principals(req), param(req, "at")));
        });
        server.Post(entry + "/values", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.append_value(req.matches[1], req.matches[2], req.matches[3], req.body));
        });
        server.Get(entry + "/history", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.get_history(req.matches[1], req.matches[2], req.matches[3], param(req, "from"),
                                          param(req, "to"), principals(req), param(req, "at")));
        });
        server.Post(entry + "/forecasts", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.post_forecast(req.matches[1], req.matches[2], req.matches[3], req.body));
        });
        server.Get(entry + "/forecasts", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.get_forecasts(req.matches[1], req.matches[2], req.matches[3], param(req, "source"),
                                            principals(req)));
        });
        server.Post("/v1/admin/purge", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.purge(param(req, "now")));
        });
        server.Get("/v1/generic/components", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.generic_components(principals(req)));
        });

        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            send(res, Response::error(500, what));
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) send(res, Response::error(res.status, "no such route"));
        });
    }
};

HttpServer::HttpServer(NimService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

} // namespace nim::service
