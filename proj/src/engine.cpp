#include "co2st/engine.hpp"

#include "co2st/error.hpp"
#include "co2st/numfmt.hpp"

#include <algorithm>
#include <cmath>

namespace co2st {

namespace {

int heaviness(Modality m)
{
    switch (m) {
    case Modality::text: return 0;
    case Modality::audio: return 1;
    case Modality::image: return 2;
    case Modality::model_3d: return 3;
    case Modality::video: return 4;
    }
    return 0;
}

std::string resolution_unit_label(ValueKind dim)
{
    switch (dim) {
    case ValueKind::word_count: return "words";
    case ValueKind::pixel_dimensions: return "pixels";
    case ValueKind::minutes: return "minutes";
    case ValueKind::seconds: return "seconds";
    default: return "units";
    }
}

std::string describe_baseline(CanonicalUnit unit, double baseline)
{
    auto dim = baseline_dimension(unit);
    return format_shortest(baseline) + " " + resolution_unit_label(dim.value_or(ValueKind::count)) + " per " +
           std::string(to_string(unit));
}

void require_range(bool ok, const char* field, const std::string& message)
{
    if (!ok)
        throw Error(ErrorCode::out_of_range, field, message);
}

double resolved_baseline(const ValidatedUseCase& use_case, const EstimationConfig& config)
{
    CanonicalUnit unit = use_case.task().canonical_unit;
    if (auto it = config.baseline_overrides.find(unit); it != config.baseline_overrides.end())
        return it->second;
    if (auto b = use_case.baseline())
        return *b;
    // Catalog construction guarantees a baseline for tasks paired with
    // resolution or volume fields.
    throw Error(ErrorCode::invalid_catalog, "baselines",
                "no baseline resolution for " + std::string(to_string(unit)));
}

} // namespace

void EstimationConfig::validate() const
{
    auto fail = [](const std::string& field, const std::string& what) {
        throw Error(ErrorCode::invalid_config, field, "config: " + field + " " + what);
    };
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };

    if (!positive(carbon_intensity))
        fail("carbon_intensity", "must be positive");
    if (!positive(equivalency_factors.car_km_per_kg))
        fail("equivalency_factors.car_km_per_kg", "must be positive");
    if (!positive(equivalency_factors.flight_minutes_per_kg))
        fail("equivalency_factors.flight_minutes_per_kg", "must be positive");
    if (!positive(equivalency_factors.tree_seedlings_per_kg))
        fail("equivalency_factors.tree_seedlings_per_kg", "must be positive");
    if (!positive(training_defaults.device_power_watts))
        fail("training_defaults.device_power_watts", "must be positive");
    if (!std::isfinite(training_defaults.pue) || training_defaults.pue < 1.0)
        fail("training_defaults.pue", "must be at least 1.0");
    for (const auto& [unit, value] : baseline_overrides) {
        std::string field = "baselines." + std::string(to_string(unit));
        if (!baseline_dimension(unit))
            fail(field, "is not a resolution-bearing unit");
        if (!positive(value))
            fail(field, "must be positive");
    }
    if (!positive(hint_thresholds.large_generation_units))
        fail("mitigation.large_generation_units", "must be positive");
    if (!positive(hint_thresholds.high_resolution_factor))
        fail("mitigation.high_resolution_factor", "must be positive");
}

UnitBreakdown aggregate_units(const ValidatedUseCase& use_case, const EstimationConfig& config)
{
    const UseKind& kind = use_case.kind();
    UnitBreakdown out;

    for (const std::string& id : use_case.defaulted())
        out.assumptions.push_back(id + " defaulted to " + format_shortest(*use_case.get(id)));

    if (kind.method == EstimationMethod::hardware) {
        const FieldSpec* hours = kind.field_with_role(FieldRole::gpu_hours);
        out.base_count = use_case.get(hours->id).value_or(0.0);
        out.n = UnitCount(out.base_count);
        return out;
    }

    double base = 1.0;
    bool has_calls = false;
    double calls = 0.0;
    for (const FieldSpec& f : kind.parameter_schema) {
        std::optional<double> value = use_case.get(f.id);
        switch (f.role) {
        case FieldRole::count:
            if (value)
                base *= *value;
            else
                out.assumptions.push_back(f.id + " not given; 1 assumed");
            break;
        case FieldRole::volume: {
            double baseline = resolved_baseline(use_case, config);
            base *= value.value_or(0.0) / baseline;
            out.assumptions.push_back(f.id + " converted at baseline " +
                                      describe_baseline(use_case.task().canonical_unit, baseline));
            break;
        }
        case FieldRole::resolution: {
            double baseline = resolved_baseline(use_case, config);
            if (value) {
                out.resolution_factor = *value / baseline;
                out.assumptions.push_back(f.id + " scaled against baseline " +
                                          describe_baseline(use_case.task().canonical_unit, baseline));
            }
            else {
                out.assumptions.push_back(f.id + " not given; baseline resolution " +
                                          describe_baseline(use_case.task().canonical_unit, baseline) + " assumed");
            }
            break;
        }
        case FieldRole::test_runs:
        case FieldRole::interactions:
            has_calls = true;
            calls += value.value_or(0.0);
            break;
        default:
            break;
        }
    }
    out.base_count = base;
    out.interaction_factor = has_calls ? calls : 1.0;
    out.n = UnitCount(out.base_count * out.resolution_factor * out.interaction_factor);
    return out;
}

UnitCount unit_count(const ValidatedUseCase& use_case, const EstimationConfig& config)
{
    return aggregate_units(use_case, config).n;
}

EnergyKWh energy_for(const TaskInfo& task, UnitCount n)
{
    // The published constants are Wh; this is the only Wh -> kWh conversion.
    return EnergyKWh(n.value() * task.energy_per_unit.value() / 1000.0);
}

EnergyKWh energy_for(TaskType task, UnitCount n)
{
    return energy_for(builtin_catalog().task(task), n);
}

CarbonKg footprint(EnergyKWh energy, const EstimationConfig& config)
{
    return CarbonKg(config.carbon_intensity * energy.value());
}

Equivalencies equivalencies(CarbonKg carbon, const EstimationConfig& config)
{
    const EquivalencyFactors& f = config.equivalency_factors;
    return {carbon.value() * f.car_km_per_kg, carbon.value() * f.flight_minutes_per_kg,
            carbon.value() * f.tree_seedlings_per_kg};
}

TaskType reduce_modality(std::span<const Modality> inputs, Modality output, const Catalog& catalog)
{
    if (inputs.empty())
        throw Error(ErrorCode::out_of_range, "inputs", "modality reduction needs at least one input modality");

    Modality heaviest = *std::max_element(inputs.begin(), inputs.end(),
                                          [](Modality a, Modality b) { return heaviness(a) < heaviness(b); });
    const TaskInfo* fallback = nullptr;
    for (const TaskInfo& t : catalog.tasks()) {
        if (t.output != output)
            continue;
        if (t.input == heaviest)
            return t.id;
        if (!fallback || t.energy_per_unit > fallback->energy_per_unit)
            fallback = &t;
    }
    if (!fallback)
        throw Error(ErrorCode::no_task_for_output, "task",
                    "no catalog task produces " + std::string(to_string(output)) + " output");
    return fallback->id;
}

std::optional<ModalityRequest> parse_modality_request(std::string_view expr)
{
    constexpr std::string_view sep = "-to-";
    auto pos = expr.find(sep);
    if (pos == std::string_view::npos)
        return std::nullopt;
    auto output = parse_modality(expr.substr(pos + sep.size()));
    if (!output)
        return std::nullopt;

    ModalityRequest req{{}, *output};
    std::string_view lhs = expr.substr(0, pos);
    while (true) {
        auto plus = lhs.find('+');
        auto m = parse_modality(lhs.substr(0, plus));
        if (!m)
            return std::nullopt;
        if (std::find(req.inputs.begin(), req.inputs.end(), *m) == req.inputs.end())
            req.inputs.push_back(*m);
        if (plus == std::string_view::npos)
            break;
        lhs.remove_prefix(plus + 1);
    }
    return req;
}

TaskType resolve_task(std::string_view expr, const Catalog& catalog, std::vector<std::string>* notes)
{
    if (auto t = parse_task_type(expr))
        return *t;
    auto req = parse_modality_request(expr);
    if (!req)
        throw Error(ErrorCode::unknown_task, "task", "unknown task type \"" + std::string(expr) + "\"");

    TaskType t = reduce_modality(req->inputs, req->output, catalog);
    if (notes) {
        const TaskInfo& info = catalog.task(t);
        bool direct = std::all_of(req->inputs.begin(), req->inputs.end(),
                                  [&](Modality m) { return heaviness(m) <= heaviness(info.input); });
        std::string note = std::string(expr) + " reduced to " + std::string(to_string(t));
        note += direct ? " (heaviest input modality)" : " (no direct task; highest-energy task with the same output)";
        notes->push_back(std::move(note));
    }
    return t;
}

Estimate estimate_training(double gpu_hours, double device_power_watts, double pue, const EstimationConfig& config)
{
    require_range(std::isfinite(gpu_hours) && gpu_hours >= 0.0, "gpu_hours", "gpu_hours must be finite and >= 0");
    require_range(std::isfinite(device_power_watts) && device_power_watts > 0.0, "device_power_watts",
                  "device_power_watts must be finite and > 0");
    require_range(std::isfinite(pue) && pue >= 1.0, "pue", "pue must be finite and >= 1");

    Estimate e;
    e.unit_count = UnitCount(gpu_hours);
    e.energy = EnergyKWh(gpu_hours * device_power_watts / 1000.0 * pue);
    e.carbon = footprint(e.energy, config);
    e.equivalencies = equivalencies(e.carbon, config);
    e.assumptions.push_back("hardware estimate: " + format_shortest(gpu_hours) + " GPU hours at " +
                            format_shortest(device_power_watts) + " W with PUE " + format_shortest(pue) +
                            " (not a proxy-model measurement)");
    e.assumptions.push_back("carbon intensity " + format_shortest(config.carbon_intensity) + " kgCO2e/kWh");
    return e;
}

Estimate estimate_use_case(const ValidatedUseCase& use_case, const EstimationConfig& config)
{
    const UseKind& kind = use_case.kind();
    UnitBreakdown units = aggregate_units(use_case, config);

    if (kind.method == EstimationMethod::hardware) {
        std::vector<std::string> assumptions = std::move(units.assumptions);
        double watts = config.training_defaults.device_power_watts;
        double pue = config.training_defaults.pue;
        if (const FieldSpec* f = kind.field_with_role(FieldRole::device_power); f && use_case.get(f->id))
            watts = *use_case.get(f->id);
        else
            assumptions.push_back("device power defaulted to " + format_shortest(watts) + " W");
        if (const FieldSpec* f = kind.field_with_role(FieldRole::pue); f && use_case.get(f->id))
            pue = *use_case.get(f->id);
        else
            assumptions.push_back("PUE defaulted to " + format_shortest(pue));

        Estimate e = estimate_training(units.base_count, watts, pue, config);
        assumptions.insert(assumptions.end(), e.assumptions.begin(), e.assumptions.end());
        e.assumptions = std::move(assumptions);
        return e;
    }

    const TaskInfo& task = use_case.task();
    Estimate e;
    e.unit_count = units.n;
    e.energy = energy_for(task, units.n);
    e.carbon = footprint(e.energy, config);
    e.equivalencies = equivalencies(e.carbon, config);
    e.assumptions = std::move(units.assumptions);
    e.assumptions.push_back(std::string(to_string(task.id)) + " energy " + std::string(task.energy_literal) +
                            " Wh per " + std::string(to_string(task.canonical_unit)) + " (proxy model " +
                            std::string(task.proxy_model) + ")");
    e.assumptions.push_back("carbon intensity " + format_shortest(config.carbon_intensity) + " kgCO2e/kWh");
    return e;
}

} // namespace co2st
