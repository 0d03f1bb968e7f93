#pragma once

#include "co2st/ledger.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace co2st {

enum class Severity : std::uint8_t { info, notable, major };

std::string_view to_string(Severity s);

struct MitigationHint {
    std::string rule_id;
    Severity severity = Severity::info;
    std::string message;
    std::vector<std::string> triggering_entries;

    bool operator==(const MitigationHint&) const = default;
};

struct MitigationRule {
    std::string_view id;
    Severity severity;
    std::string_view title;
    std::string_view advice;
};

/// Fixed registry, evaluated in this order.
std::span<const MitigationRule> mitigation_rules();

struct Report {
    std::string project;
    Timestamp generated_at{};
    double carbon_intensity = default_carbon_intensity;
    Estimate total;
    std::map<ResearchPhase, Estimate> per_phase;
    std::vector<EntryEstimate> per_entry;
    std::vector<MitigationHint> hints;
    std::vector<std::string> assumptions;

    bool operator==(const Report&) const = default;
};

std::vector<MitigationHint> mitigation_hints(const Ledger& ledger, const LedgerTotal& totals,
                                             const EstimationConfig& config);
std::vector<MitigationHint> mitigation_hints(const Ledger& ledger, const Catalog& catalog,
                                             const EstimationConfig& config);

Report build_report(const Ledger& ledger, const Catalog& catalog, const EstimationConfig& config,
                    Timestamp generated_at);

/// Templated paragraph for a manuscript's ethics statement.
std::string ethical_statement(const Report& report);

enum class RenderFormat { text, machine };

std::string render(const Report& report, RenderFormat format);

/// Inverse of the machine render.
Report parse_report(std::string_view machine_text);

} // namespace co2st
