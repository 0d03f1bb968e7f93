#include "co2st/report.hpp"

#include "co2st/codec.hpp"
#include "co2st/numfmt.hpp"
#include "json_util.hpp"

#include <array>
#include <cstdio>
#include <set>

namespace co2st {

namespace {

constexpr std::array<MitigationRule, 4> rules = {{
    {"R1", Severity::major, "Training and fine-tuning",
     "Training or fine-tuning a model outweighs almost any amount of prompting. Check whether an existing model "
     "already fits the study, keep the number of training runs small, and log the hardware used."},
    {"R2", Severity::major, "Large-scale data generation",
     "Generating large datasets is one of the heaviest research uses. Check whether a smaller generated sample "
     "supports the same analysis."},
    {"R3", Severity::notable, "High task load",
     "Energy grows with prompt length and output resolution. Use the smallest size the research question needs."},
    {"R4", Severity::info, "Participant prompting",
     "Participants produce most of the calls in a study. Brief them on prompting for the study task so fewer "
     "outputs are discarded."},
}};

std::optional<double> interactions_of(const UseCaseEntry& entry, const Catalog* catalog)
{
    if (catalog) {
        if (const UseKind* kind = catalog->find_kind(entry.kind)) {
            if (const FieldSpec* f = kind->field_with_role(FieldRole::interactions)) {
                auto it = entry.params.find(f->id);
                if (it != entry.params.end())
                    return it->second;
            }
            return std::nullopt;
        }
    }
    auto it = entry.params.find("interactions");
    if (it == entry.params.end())
        return std::nullopt;
    return it->second;
}

std::vector<MitigationHint> evaluate_rules(const Ledger& ledger, const LedgerTotal& totals,
                                           const EstimationConfig& config, const Catalog* catalog)
{
    std::array<std::vector<std::string>, rules.size()> hits;
    const HintThresholds& t = config.hint_thresholds;

    for (std::size_t i = 0; i < ledger.entries.size() && i < totals.breakdown.size(); ++i) {
        const UseCaseEntry& entry = ledger.entries[i];
        const EntryEstimate& est = totals.breakdown[i];

        if (entry.phase == ResearchPhase::training_fine_tuning)
            hits[0].push_back(entry.id);
        if (entry.phase == ResearchPhase::data_collection &&
            est.estimate.unit_count.value() > t.large_generation_units)
            hits[1].push_back(entry.id);
        if (est.resolution_factor > t.high_resolution_factor)
            hits[2].push_back(entry.id);
        if (entry.phase == ResearchPhase::evaluation_user_studies && interactions_of(entry, catalog).value_or(0.0) > 0.0)
            hits[3].push_back(entry.id);
    }

    std::vector<MitigationHint> out;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        if (hits[r].empty())
            continue;
        out.push_back({std::string(rules[r].id), rules[r].severity,
                       std::string(rules[r].title) + ": " + std::string(rules[r].advice), std::move(hits[r])});
    }
    return out;
}

std::string pad(std::string_view s, std::size_t width)
{
    std::string out(s);
    if (out.size() < width)
        out.append(width - out.size(), ' ');
    return out;
}

std::string lpad(std::string_view s, std::size_t width)
{
    std::string out;
    if (s.size() < width)
        out.append(width - s.size(), ' ');
    out += s;
    return out;
}

std::string rstrip(std::string s)
{
    while (!s.empty() && s.back() == ' ')
        s.pop_back();
    return s;
}

void append_equivalencies(std::string& out, const Equivalencies& eq)
{
    out += "  " + format_sig(eq.car_km) + " km driven in a gasoline-powered car\n";
    out += "  " + format_sig(eq.flight_minutes) + " minutes as a passenger on a commercial airplane\n";
    out += "  " + format_sig(eq.tree_seedlings) + " tree seedlings grown for 10 years\n";
}

std::string render_text(const Report& r)
{
    std::string out;
    out += "GenAI carbon report: " + r.project + "\n";
    out += "Generated: " + format_timestamp(r.generated_at) + "\n";
    out += "Carbon intensity: " + format_shortest(r.carbon_intensity) + " kgCO2e/kWh\n";
    out += "\n";

    out += rstrip(lpad("#", 3) + "  " + pad("id", 14) + pad("phase", 29) + pad("kind", 30) + pad("task", 16) +
                  lpad("units", 10) + lpad("energy_kwh", 12) + lpad("carbon_kg", 12)) +
           "\n";
    if (r.per_entry.empty())
        out += "  (no use cases recorded)\n";
    std::size_t n = 0;
    for (const EntryEstimate& e : r.per_entry) {
        ++n;
        out += rstrip(lpad(std::to_string(n), 3) + "  " + pad(e.entry_id, 14) + pad(to_string(e.phase), 29) +
                      pad(e.kind, 30) + pad(to_string(e.task), 16) + lpad(format_sig(e.estimate.unit_count.value()), 10) +
                      lpad(format_sig(e.estimate.energy.value()), 12) + lpad(format_sig(e.estimate.carbon.value()), 12)) +
               "\n";
    }
    out += rstrip(pad("Total", 5 + 14 + 29 + 30 + 16) + lpad("", 10) + lpad(format_sig(r.total.energy.value()), 12) +
                  lpad(format_sig(r.total.carbon.value()), 12)) +
           "\n";
    out += "\n";

    out += "Per phase:\n";
    if (r.per_phase.empty())
        out += "  (none)\n";
    for (const auto& [phase, est] : r.per_phase)
        out += "  " + pad(to_string(phase), 29) + lpad(format_sig(est.energy.value()), 12) + " kWh" +
               lpad(format_sig(est.carbon.value()), 12) + " kgCO2e\n";
    out += "\n";

    out += "Total: " + format_sig(r.total.carbon.value()) + " kgCO2e (" + format_sig(r.total.energy.value()) +
           " kWh), equivalent to:\n";
    append_equivalencies(out, r.total.equivalencies);
    out += "\n";

    out += "Mitigation hints:\n";
    if (r.hints.empty())
        out += "  (none)\n";
    for (const MitigationHint& h : r.hints) {
        out += "  [" + std::string(to_string(h.severity)) + "] " + h.rule_id + " " + h.message + "\n";
        std::string ids;
        for (const std::string& id : h.triggering_entries)
            ids += (ids.empty() ? "" : ", ") + id;
        out += "      entries: " + ids + "\n";
    }
    out += "\n";

    out += "Assumptions:\n";
    if (r.assumptions.empty())
        out += "  (none)\n";
    for (const std::string& a : r.assumptions)
        out += "  - " + a + "\n";
    return out;
}

} // namespace

std::string_view to_string(Severity s)
{
    switch (s) {
    case Severity::info: return "info";
    case Severity::notable: return "notable";
    case Severity::major: return "major";
    }
    return "info";
}

std::span<const MitigationRule> mitigation_rules() { return rules; }

std::vector<MitigationHint> mitigation_hints(const Ledger& ledger, const LedgerTotal& totals,
                                             const EstimationConfig& config)
{
    return evaluate_rules(ledger, totals, config, nullptr);
}

std::vector<MitigationHint> mitigation_hints(const Ledger& ledger, const Catalog& catalog,
                                             const EstimationConfig& config)
{
    return evaluate_rules(ledger, total(ledger, catalog, config), config, &catalog);
}

Report build_report(const Ledger& ledger, const Catalog& catalog, const EstimationConfig& config,
                    Timestamp generated_at)
{
    LedgerTotal totals = total(ledger, catalog, config);

    Report r;
    r.project = ledger.project;
    r.generated_at = generated_at;
    r.carbon_intensity = config.carbon_intensity;
    r.hints = evaluate_rules(ledger, totals, config, &catalog);

    std::map<ResearchPhase, std::set<std::string, std::less<>>> phase_seen;
    for (const EntryEstimate& e : totals.breakdown) {
        Estimate& p = r.per_phase[e.phase];
        p.unit_count += e.estimate.unit_count;
        p.energy += e.estimate.energy;
        p.carbon += e.estimate.carbon;
        for (const std::string& a : e.estimate.assumptions) {
            if (phase_seen[e.phase].insert(a).second)
                p.assumptions.push_back(a);
        }
    }
    for (auto& [phase, est] : r.per_phase)
        est.equivalencies = equivalencies(est.carbon, config);

    r.assumptions = totals.total.assumptions;
    r.total = std::move(totals.total);
    r.per_entry = std::move(totals.breakdown);
    return r;
}

std::string ethical_statement(const Report& r)
{
    const Equivalencies& eq = r.total.equivalencies;
    std::string project = r.project.empty() ? "this project" : "the project \"" + r.project + "\"";
    return "We estimate that the use of generative AI in " + project + " consumed " +
           format_sig(r.total.energy.value()) + " kWh of electricity, corresponding to " +
           format_sig(r.total.carbon.value()) + " kgCO2e at a carbon intensity of " +
           format_shortest(r.carbon_intensity) + " kgCO2e/kWh. This is comparable to " + format_sig(eq.car_km) +
           " km driven in a gasoline-powered car, " + format_sig(eq.flight_minutes) +
           " minutes as a passenger on a commercial airplane, or the carbon taken up by " +
           format_sig(eq.tree_seedlings) +
           " tree seedlings grown for 10 years. The figures are estimates based on per-interaction energy "
           "measurements of open proxy models for each task type, not on measurements of the services we used.\n";
}

std::string render(const Report& report, RenderFormat format)
{
    if (format == RenderFormat::machine)
        return codec::to_json(report).dump(2) + "\n";
    return render_text(report);
}

Report parse_report(std::string_view machine_text)
{
    return codec::report_from_json(jsonutil::parse_document(machine_text));
}

} // namespace co2st
