#pragma once

#include "co2st/catalog.hpp"
#include "co2st/engine.hpp"

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace co2st {

using Timestamp = std::chrono::sys_seconds;

inline constexpr int ledger_format_version = 1;

/// One recorded GenAI use. `params` holds the raw user inputs; derived
/// quantities are never stored.
struct UseCaseEntry {
    std::string id;
    ResearchPhase phase = ResearchPhase::research_planning;
    std::string kind;
    TaskType task = TaskType::text_to_text;
    ParamMap params;
    std::string note;
    Timestamp created_at{};

    bool operator==(const UseCaseEntry&) const = default;
};

struct Ledger {
    int format_version = ledger_format_version;
    std::string project;
    std::vector<UseCaseEntry> entries;

    bool operator==(const Ledger&) const = default;
};

struct EntryEstimate {
    std::string entry_id;
    ResearchPhase phase = ResearchPhase::research_planning;
    std::string kind;
    TaskType task = TaskType::text_to_text;
    double base_count = 0.0;
    double resolution_factor = 1.0;
    double interaction_factor = 1.0;
    Estimate estimate;

    bool operator==(const EntryEstimate&) const = default;
};

struct LedgerTotal {
    Estimate total;
    std::vector<EntryEstimate> breakdown;
};

/// Random 12-digit lowercase hex id.
std::string generate_entry_id();

Timestamp now_utc();
/// RFC 3339, UTC, second precision: "2025-03-01T12:00:00Z".
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text, const std::string& field = "created_at");

/// Validates an entry against the catalog, including that its phase matches
/// the kind's phase.
ValidatedUseCase validate_entry(const UseCaseEntry& entry, const Catalog& catalog);

Ledger add_entry(Ledger ledger, UseCaseEntry entry, const Catalog& catalog);
Ledger remove_entry(Ledger ledger, std::string_view id);

/// Sums per-entry estimates in ledger order. Errors are rethrown with the
/// offending entry id prefixed to the message.
LedgerTotal total(const Ledger& ledger, const Catalog& catalog, const EstimationConfig& config);

std::string serialize_ledger(const Ledger& ledger);
Ledger parse_ledger(std::string_view text, const Catalog& catalog);

/// Writes via a temporary file and rename.
void save_ledger(const Ledger& ledger, const std::string& path);
Ledger load_ledger(const std::string& path, const Catalog& catalog);

} // namespace co2st
