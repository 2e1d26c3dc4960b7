#pragma once

#include <memory>
#include <string>

#include "nim/service/service.hpp"

namespace nim::service {

/// Serves a NimService over HTTP/1.1 under `/v1`.
class HttpServer {
public:
    explicit HttpServer(NimService& service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds without serving yet. Port 0 picks a free port. Returns the bound
    /// port; throws std::runtime_error when binding fails.
    int bind(const std::string& host, int port);

    /// Blocks serving requests until stop() is called.
    void listen();

    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace nim::service
