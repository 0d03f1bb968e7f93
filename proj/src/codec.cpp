#include "co2st/codec.hpp"

#include "co2st/error.hpp"
#include "json_util.hpp"

namespace co2st::codec {

using jsonutil::ObjectReader;
using jsonutil::index_path;
using jsonutil::join_path;

namespace {

std::vector<std::string> string_list(const json& value, const std::string& path)
{
    if (!value.is_array())
        jsonutil::schema_error(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < value.size(); ++i)
        out.push_back(ObjectReader::as_string(value[i], index_path(path, i)));
    return out;
}

Severity severity_from_string(const std::string& s, const std::string& path)
{
    if (s == "info")
        return Severity::info;
    if (s == "notable")
        return Severity::notable;
    if (s == "major")
        return Severity::major;
    jsonutil::schema_error(path, "unknown severity \"" + s + "\"");
}

} // namespace

json to_json(const Estimate& e)
{
    return json{
        {"unit_count", e.unit_count.value()},
        {"energy_kwh", e.energy.value()},
        {"carbon_kg", e.carbon.value()},
        {"equivalencies",
         {
             {"car_km", e.equivalencies.car_km},
             {"flight_minutes", e.equivalencies.flight_minutes},
             {"tree_seedlings", e.equivalencies.tree_seedlings},
         }},
        {"assumptions", e.assumptions},
    };
}

Estimate estimate_from_json(const json& value, const std::string& path)
{
    ObjectReader r(value, path);
    Estimate e;
    e.unit_count = UnitCount(r.require_number("unit_count"));
    e.energy = EnergyKWh(r.require_number("energy_kwh"));
    e.carbon = CarbonKg(r.require_number("carbon_kg"));
    ObjectReader eq = r.require_object("equivalencies");
    e.equivalencies.car_km = eq.require_number("car_km");
    e.equivalencies.flight_minutes = eq.require_number("flight_minutes");
    e.equivalencies.tree_seedlings = eq.require_number("tree_seedlings");
    eq.finish();
    e.assumptions = string_list(r.require("assumptions"), join_path(path, "assumptions"));
    r.finish();
    return e;
}

json to_json(const EntryEstimate& e)
{
    return json{
        {"id", e.entry_id},
        {"phase", to_string(e.phase)},
        {"kind", e.kind},
        {"task", to_string(e.task)},
        {"base_count", e.base_count},
        {"resolution_factor", e.resolution_factor},
        {"interaction_factor", e.interaction_factor},
        {"estimate", to_json(e.estimate)},
    };
}

json to_json(const MitigationHint& h)
{
    return json{
        {"rule_id", h.rule_id},
        {"severity", to_string(h.severity)},
        {"message", h.message},
        {"triggering_entries", h.triggering_entries},
    };
}

json to_json(const Report& r)
{
    json per_phase = json::object();
    for (const auto& [phase, est] : r.per_phase)
        per_phase[std::string(to_string(phase))] = to_json(est);
    json per_entry = json::array();
    for (const EntryEstimate& e : r.per_entry)
        per_entry.push_back(to_json(e));
    json hints = json::array();
    for (const MitigationHint& h : r.hints)
        hints.push_back(to_json(h));

    return json{
        {"project", r.project},
        {"generated_at", format_timestamp(r.generated_at)},
        {"carbon_intensity", r.carbon_intensity},
        {"total", to_json(r.total)},
        {"per_phase", std::move(per_phase)},
        {"per_entry", std::move(per_entry)},
        {"hints", std::move(hints)},
        {"assumptions", r.assumptions},
    };
}

Report report_from_json(const json& value)
{
    ObjectReader r(value, "");
    Report out;
    out.project = r.require_string("project");
    out.generated_at = parse_timestamp(r.require_string("generated_at"), "generated_at");
    out.carbon_intensity = r.require_number("carbon_intensity");
    out.total = estimate_from_json(r.require("total"), "total");

    const json& per_phase = r.require("per_phase");
    if (!per_phase.is_object())
        jsonutil::schema_error("per_phase", "expected an object");
    for (auto it = per_phase.begin(); it != per_phase.end(); ++it) {
        std::string path = join_path("per_phase", it.key());
        out.per_phase[phase_from_string(it.key(), path)] = estimate_from_json(it.value(), path);
    }

    const json& per_entry = r.require_array("per_entry");
    for (std::size_t i = 0; i < per_entry.size(); ++i) {
        std::string path = index_path("per_entry", i);
        ObjectReader er(per_entry[i], path);
        EntryEstimate e;
        e.entry_id = er.require_string("id");
        e.phase = phase_from_string(er.require_string("phase"), join_path(path, "phase"));
        e.kind = er.require_string("kind");
        e.task = task_from_string(er.require_string("task"), join_path(path, "task"));
        e.base_count = er.require_number("base_count");
        e.resolution_factor = er.require_number("resolution_factor");
        e.interaction_factor = er.require_number("interaction_factor");
        e.estimate = estimate_from_json(er.require("estimate"), join_path(path, "estimate"));
        er.finish();
        out.per_entry.push_back(std::move(e));
    }

    const json& hints = r.require_array("hints");
    for (std::size_t i = 0; i < hints.size(); ++i) {
        std::string path = index_path("hints", i);
        ObjectReader hr(hints[i], path);
        MitigationHint h;
        h.rule_id = hr.require_string("rule_id");
        h.severity = severity_from_string(hr.require_string("severity"), join_path(path, "severity"));
        h.message = hr.require_string("message");
        h.triggering_entries = string_list(hr.require("triggering_entries"), join_path(path, "triggering_entries"));
        hr.finish();
        out.hints.push_back(std::move(h));
    }

    out.assumptions = string_list(r.require("assumptions"), "assumptions");
    r.finish();
    return out;
}

json to_json(const TaskInfo& t)
{
    return json{
        {"id", to_string(t.id)},
        {"energy_wh", t.energy_per_unit.value()},
        {"energy_wh_literal", t.energy_literal},
        {"canonical_unit", to_string(t.canonical_unit)},
        {"proxy_model", t.proxy_model},
        {"input", to_string(t.input)},
        {"output", to_string(t.output)},
    };
}

json to_json(const UseKind& k)
{
    json fields = json::array();
    for (const FieldSpec& f : k.parameter_schema) {
        json field{
            {"id", f.id},
            {"label", f.label},
            {"value_kind", to_string(f.value_kind)},
            {"role", to_string(f.role)},
            {"required", f.required},
            {"minimum", f.minimum},
        };
        if (auto d = k.defaults.find(f.id); d != k.defaults.end())
            field["default"] = d->second;
        fields.push_back(std::move(field));
    }
    json tasks = json::array();
    for (TaskType t : k.allowed_tasks)
        tasks.push_back(to_string(t));
    return json{
        {"id", k.id},
        {"display_name", k.display_name},
        {"phase", to_string(k.phase)},
        {"method", to_string(k.method)},
        {"allowed_tasks", std::move(tasks)},
        {"locked", k.locked()},
        {"parameter_schema", std::move(fields)},
    };
}

} // namespace co2st::codec
