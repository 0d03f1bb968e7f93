#pragma once

#include "co2st/catalog.hpp"
#include "co2st/engine.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace co2st {

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Error body for every non-2xx response:
/// {"status": int, "code": string, "message": string, "field": string|null}.
ApiResponse api_error(int status, std::string_view code, const std::string& message, const std::string& field = "");

/// Transport-independent request handling for the /api/v1 routes. Handlers
/// only read the catalog and config, so one instance can serve concurrent
/// requests.
class Api {
public:
    Api(Catalog catalog, EstimationConfig config);

    ApiResponse handle(const ApiRequest& request) const;

    const Catalog& catalog() const { return catalog_; }
    const EstimationConfig& config() const { return config_; }

private:
    ApiResponse estimate(const ApiRequest& request) const;
    ApiResponse report(const ApiRequest& request) const;
    ApiResponse kinds(const ApiRequest& request) const;

    Catalog catalog_;
    EstimationConfig config_;
};

struct ServerOptions {
    std::string bind = "127.0.0.1";
    int port = 8347;
    std::vector<std::string> cors_origins;
    std::size_t max_body_bytes = 1 << 20;
};

/// HTTP/1.1 front end for Api.
class Server {
public:
    Server(Api api, ServerOptions options);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the listening socket. Port 0 picks a free port; returns the
    /// bound port. Throws Error(io) on failure.
    int bind();
    /// Serves until stop(). Requires bind().
    void listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace co2st
