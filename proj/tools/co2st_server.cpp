#include "co2st/config.hpp"
#include "co2st/error.hpp"
#include "co2st/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

namespace {

co2st::Server* active_server = nullptr;

void handle_signal(int)
{
    if (active_server)
        active_server->stop();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"HTTP service for GenAI carbon estimates"};
    co2st::ServerOptions options;
    std::string config_path;
    std::string catalog_path;
    app.add_option("--bind", options.bind, "Bind address")->capture_default_str();
    app.add_option("--port", options.port, "Port (0 picks a free one)")->capture_default_str();
    app.add_option("--config", config_path, "Config file (default: $CO2ST_CONFIG or built-in values)");
    app.add_option("--catalog", catalog_path, "Catalog overlay file (default: $CO2ST_CATALOG)");
    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty()) {
            if (const char* env = std::getenv(co2st::config_env_var))
                config_path = env;
        }
        if (catalog_path.empty()) {
            if (const char* env = std::getenv(co2st::catalog_env_var))
                catalog_path = env;
        }
        co2st::AppConfig config = config_path.empty() ? co2st::AppConfig{} : co2st::load_config(config_path);
        co2st::Catalog catalog = catalog_path.empty() ? co2st::builtin_catalog()
                                                      : co2st::load_catalog_overlay(co2st::builtin_catalog(), catalog_path);
        options.cors_origins = config.cors_origins;

        co2st::Server server(co2st::Api(std::move(catalog), config.estimation), options);
        int port = server.bind();
        active_server = &server;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        std::cerr << "listening on http://" << options.bind << ":" << port << "/api/v1/\n";
        server.listen();
        active_server = nullptr;
    }
    catch (const co2st::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_io() ? 2 : 1;
    }
    return 0;
}
