#pragma once

#include "co2st/catalog.hpp"
#include "co2st/quantity.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace co2st {

/// Global average grid carbon intensity, kgCO2e per kWh.
inline constexpr double default_carbon_intensity = 0.481;

// Multipliers from kgCO2e to relatable quantities. Defaults and their
// derivation are recorded in config/co2st.json.
struct EquivalencyFactors {
    double car_km_per_kg = 4.095022900763359;
    double flight_minutes_per_kg = 0.5;
    double tree_seedlings_per_kg = 0.016666666666666666;

    bool operator==(const EquivalencyFactors&) const = default;
};

struct TrainingDefaults {
    double device_power_watts = 350.0;
    double pue = 1.2;

    bool operator==(const TrainingDefaults&) const = default;
};

struct HintThresholds {
    double large_generation_units = 10000.0;
    double high_resolution_factor = 2.0;

    bool operator==(const HintThresholds&) const = default;
};

struct EstimationConfig {
    double carbon_intensity = default_carbon_intensity;
    EquivalencyFactors equivalency_factors;
    TrainingDefaults training_defaults;
    /// Replaces the catalog's baseline resolution for a unit.
    std::map<CanonicalUnit, double> baseline_overrides;
    HintThresholds hint_thresholds;

    /// Throws Error(invalid_config) when an invariant is broken.
    void validate() const;

    bool operator==(const EstimationConfig&) const = default;
};

struct Equivalencies {
    double car_km = 0.0;
    double flight_minutes = 0.0;
    double tree_seedlings = 0.0;

    bool operator==(const Equivalencies&) const = default;
};

struct Estimate {
    UnitCount unit_count;
    EnergyKWh energy;
    CarbonKg carbon;
    Equivalencies equivalencies;
    std::vector<std::string> assumptions;

    bool operator==(const Estimate&) const = default;
};

// The three factors whose product is N, plus the assumptions applied while
// computing them.
struct UnitBreakdown {
    double base_count = 0.0;
    double resolution_factor = 1.0;
    double interaction_factor = 1.0;
    UnitCount n;
    std::vector<std::string> assumptions;
};

UnitBreakdown aggregate_units(const ValidatedUseCase& use_case, const EstimationConfig& config);
UnitCount unit_count(const ValidatedUseCase& use_case, const EstimationConfig& config);

/// E = N * E_p, converted from Wh to kWh.
EnergyKWh energy_for(const TaskInfo& task, UnitCount n);
EnergyKWh energy_for(TaskType task, UnitCount n);

/// C = CI * E.
CarbonKg footprint(EnergyKWh energy, const EstimationConfig& config);

Equivalencies equivalencies(CarbonKg carbon, const EstimationConfig& config);

/// Collapses a multi-modal request onto one catalog task. The heaviest input
/// modality (video > 3d > image > audio > text) is paired with the output; if
/// that task is not in the catalog, the output-compatible task with the
/// largest per-unit energy is used instead.
TaskType reduce_modality(std::span<const Modality> inputs, Modality output, const Catalog& catalog);

struct ModalityRequest {
    std::vector<Modality> inputs;
    Modality output;
};

/// Parses "text+image-to-image" style expressions.
std::optional<ModalityRequest> parse_modality_request(std::string_view expr);

/// Accepts a task id or a modality expression; records any reduction in `notes`.
TaskType resolve_task(std::string_view expr, const Catalog& catalog, std::vector<std::string>* notes = nullptr);

Estimate estimate_use_case(const ValidatedUseCase& use_case, const EstimationConfig& config);

/// Device-energy estimate for training and fine-tuning: E = hours * W / 1000 * PUE.
Estimate estimate_training(double gpu_hours, double device_power_watts, double pue, const EstimationConfig& config);

} // namespace co2st
