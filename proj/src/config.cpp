#include "co2st/config.hpp"

#include "co2st/error.hpp"
#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace co2st {

AppConfig parse_config(std::string_view text)
{
    using jsonutil::ObjectReader;
    auto doc = jsonutil::parse_document(text);
    ObjectReader top(doc, "");
    AppConfig cfg;
    EstimationConfig& est = cfg.estimation;

    if (const auto* v = top.optional("format_version")) {
        long long version = ObjectReader::as_integer(*v, "format_version");
        if (version != 1)
            throw Error(ErrorCode::unsupported_version, "format_version",
                        "unsupported config format_version " + std::to_string(version));
    }
    if (const auto* v = top.optional("carbon_intensity"))
        est.carbon_intensity = ObjectReader::as_number(*v, "carbon_intensity");

    if (const auto* v = top.optional("equivalency_factors")) {
        ObjectReader r(*v, "equivalency_factors");
        if (const auto* f = r.optional("car_km_per_kg"))
            est.equivalency_factors.car_km_per_kg = ObjectReader::as_number(*f, "equivalency_factors.car_km_per_kg");
        if (const auto* f = r.optional("flight_minutes_per_kg"))
            est.equivalency_factors.flight_minutes_per_kg =
                ObjectReader::as_number(*f, "equivalency_factors.flight_minutes_per_kg");
        if (const auto* f = r.optional("tree_seedlings_per_kg"))
            est.equivalency_factors.tree_seedlings_per_kg =
                ObjectReader::as_number(*f, "equivalency_factors.tree_seedlings_per_kg");
        r.finish();
    }

    if (const auto* v = top.optional("training_defaults")) {
        ObjectReader r(*v, "training_defaults");
        if (const auto* f = r.optional("device_power_watts"))
            est.training_defaults.device_power_watts =
                ObjectReader::as_number(*f, "training_defaults.device_power_watts");
        if (const auto* f = r.optional("pue"))
            est.training_defaults.pue = ObjectReader::as_number(*f, "training_defaults.pue");
        r.finish();
    }

    if (const auto* v = top.optional("baselines")) {
        if (!v->is_object())
            jsonutil::schema_error("baselines", "expected an object");
        for (auto it = v->begin(); it != v->end(); ++it) {
            std::string path = jsonutil::join_path("baselines", it.key());
            auto unit = parse_canonical_unit(it.key());
            if (!unit)
                jsonutil::schema_error(path, "unknown canonical unit");
            est.baseline_overrides[*unit] = ObjectReader::as_number(it.value(), path);
        }
    }

    if (const auto* v = top.optional("mitigation")) {
        ObjectReader r(*v, "mitigation");
        if (const auto* f = r.optional("large_generation_units"))
            est.hint_thresholds.large_generation_units = ObjectReader::as_number(*f, "mitigation.large_generation_units");
        if (const auto* f = r.optional("high_resolution_factor"))
            est.hint_thresholds.high_resolution_factor = ObjectReader::as_number(*f, "mitigation.high_resolution_factor");
        r.finish();
    }

    if (const auto* v = top.optional("service")) {
        ObjectReader r(*v, "service");
        if (const auto* origins = r.optional("cors_origins")) {
            if (!origins->is_array())
                jsonutil::schema_error("service.cors_origins", "expected an array");
            for (std::size_t i = 0; i < origins->size(); ++i)
                cfg.cors_origins.push_back(
                    ObjectReader::as_string((*origins)[i], jsonutil::index_path("service.cors_origins", i)));
        }
        r.finish();
    }

    // Free-form provenance notes for the constants above.
    if (const auto* v = top.optional("provenance")) {
        if (!v->is_object())
            jsonutil::schema_error("provenance", "expected an object");
    }
    top.finish();

    est.validate();
    return cfg;
}

AppConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, path, "cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace co2st
