#pragma once

#include "co2st/engine.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace co2st {

/// Environment variable naming the config file used by the CLI and server.
inline constexpr const char* config_env_var = "CO2ST_CONFIG";
/// Environment variable naming an optional catalog overlay file.
inline constexpr const char* catalog_env_var = "CO2ST_CATALOG";

struct AppConfig {
    EstimationConfig estimation;
    /// Origins allowed to call the HTTP service from a browser.
    std::vector<std::string> cors_origins;

    bool operator==(const AppConfig&) const = default;
};

/// Config documents use the ledger's JSON syntax; unknown keys are rejected.
/// Keys that are absent keep their compiled-in defaults.
AppConfig parse_config(std::string_view text);
AppConfig load_config(const std::string& path);

} // namespace co2st
