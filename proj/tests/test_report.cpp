#include "co2st/error.hpp"
#include "co2st/report.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace co2st;
using namespace co2st::testing;

namespace {

const Catalog& cat()
{
    return builtin_catalog();
}

std::string slurp(const std::string& rel)
{
    std::ifstream in(std::string(CO2ST_TEST_DATA) + "/" + rel, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Ledger one(UseCaseEntry e)
{
    Ledger l;
    l.project = "hints";
    l.entries.push_back(std::move(e));
    return l;
}

std::vector<std::string> fired(const Ledger& l)
{
    std::vector<std::string> ids;
    for (const MitigationHint& h : mitigation_hints(l, cat(), {}))
        ids.push_back(h.rule_id);
    return ids;
}

using Ids = std::vector<std::string>;

} // namespace

TEST_CASE("rule registry")
{
    auto rules = mitigation_rules();
    REQUIRE(rules.size() == 4);
    CHECK(rules[0].id == "R1");
    CHECK(rules[0].severity == Severity::major);
    CHECK(rules[1].severity == Severity::major);
    CHECK(rules[2].severity == Severity::notable);
    CHECK(rules[3].severity == Severity::info);
}

TEST_CASE("each rule fires on its fixture")
{
    CHECK(fired(one(make_entry("t", "fine-tuning", TaskType::text_to_text, {{"gpu_hours", 1}}))) == Ids{"R1"});
    CHECK(fired(one(make_entry("d", "dataset-generation", TaskType::text_to_image, {{"outputs", 20000}}))) ==
          Ids{"R2"});
    CHECK(fired(one(make_entry("r", "manuscript-text", TaskType::text_to_text,
                               {{"prompts", 5}, {"words_per_prompt", 1500}}))) == Ids{"R3"});
    CHECK(fired(one(make_entry("u", "user-study", TaskType::text_to_text, {{"interactions", 50}}))) == Ids{"R4"});
}

TEST_CASE("rules stay quiet below their thresholds")
{
    CHECK(fired(one(make_entry("p", "manuscript-text", TaskType::text_to_text, {{"prompts", 10}}))).empty());
    CHECK(fired(one(make_entry("d", "dataset-generation", TaskType::text_to_image, {{"outputs", 10000}}))).empty());
    CHECK(fired(one(make_entry("r", "manuscript-text", TaskType::text_to_text,
                               {{"prompts", 5}, {"words_per_prompt", 1000}}))).empty());
    CHECK(fired(one(make_entry("u", "user-evaluation", TaskType::text_to_text, {{"interactions", 0}}))).empty());
    // large generation outside data collection is not R2
    CHECK(fired(one(make_entry("m", "prototype-content-generation", TaskType::text_to_image, {{"outputs", 50000}})))
              .empty());
    CHECK(fired(Ledger{}).empty());
}

TEST_CASE("hints list every triggering entry in ledger order")
{
    Ledger l;
    l.entries = {
        make_entry("x1", "fine-tuning", TaskType::text_to_text, {{"gpu_hours", 1}}),
        make_entry("x2", "user-study", TaskType::text_to_image, {{"interactions", 3}}),
        make_entry("x3", "model-training", TaskType::text_to_image, {{"gpu_hours", 2}}),
    };
    auto hints = mitigation_hints(l, cat(), {});
    REQUIRE(hints.size() == 2);
    CHECK(hints[0].rule_id == "R1");
    CHECK(hints[0].triggering_entries == Ids{"x1", "x3"});
    CHECK(hints[1].rule_id == "R4");
    CHECK(hints[1].triggering_entries == Ids{"x2"});
}

TEST_CASE("hints are sound on random ledgers")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        Ledger l = random_ledger(rng, 1 + i % 15);
        LedgerTotal t = total(l, cat(), {});
        for (const MitigationHint& h : mitigation_hints(l, cat(), {})) {
            CHECK_FALSE(h.triggering_entries.empty());
            for (const std::string& id : h.triggering_entries) {
                auto it = std::find_if(l.entries.begin(), l.entries.end(), [&](auto& e) { return e.id == id; });
                REQUIRE(it != l.entries.end());
                const EntryEstimate& est = t.breakdown[static_cast<std::size_t>(it - l.entries.begin())];
                if (h.rule_id == "R1")
                    CHECK(it->phase == ResearchPhase::training_fine_tuning);
                else if (h.rule_id == "R2")
                    CHECK((it->phase == ResearchPhase::data_collection && est.estimate.unit_count.value() > 10000));
                else if (h.rule_id == "R3")
                    CHECK(est.resolution_factor > 2.0);
                else
                    CHECK(it->phase == ResearchPhase::evaluation_user_studies);
            }
        }
    }
}

TEST_CASE("report totals and per-phase sums")
{
    Ledger l = parse_ledger(slurp("fixtures/thesis.json"), cat());
    Report r = build_report(l, cat(), {}, at(2025, 4, 1));
    REQUIRE(r.per_entry.size() == 3);
    CHECK(r.per_entry[2].estimate.unit_count.value() == 160.0);
    CHECK(std::fabs(r.total.energy.value() - 0.00134051) < 1e-15);
    double phase_sum = 0.0;
    for (const auto& [phase, est] : r.per_phase)
        phase_sum += est.energy.value();
    CHECK(std::fabs(phase_sum - r.total.energy.value()) <= 1e-12 * r.total.energy.value());
    CHECK(r.per_phase.size() == 3);
}

TEST_CASE("text and machine renderings match goldens")
{
    Ledger l = parse_ledger(slurp("fixtures/thesis.json"), cat());
    Report r = build_report(l, cat(), {}, parse_timestamp("2025-04-01T00:00:00Z"));
    CHECK(render(r, RenderFormat::text) == slurp("golden/thesis_report.txt"));
    CHECK(render(r, RenderFormat::machine) == slurp("golden/thesis_report.json"));
    CHECK(ethical_statement(r) == slurp("golden/thesis_ethics.txt"));

    Ledger empty = parse_ledger(slurp("fixtures/empty.json"), cat());
    CHECK(render(build_report(empty, cat(), {}, at(2025, 4, 1)), RenderFormat::text) ==
          slurp("golden/empty_report.txt"));
}

TEST_CASE("rendering is deterministic and machine output round-trips")
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 30; ++i) {
        Report r = build_report(random_ledger(rng, i % 10), cat(), {}, at(2025, 5, 6, 7, 8, 9));
        CHECK(render(r, RenderFormat::text) == render(r, RenderFormat::text));
        std::string machine = render(r, RenderFormat::machine);
        Report back = parse_report(machine);
        CHECK(back == r);
        CHECK(render(back, RenderFormat::machine) == machine);
    }
}

TEST_CASE("ethical statement rounds to four significant digits")
{
    Ledger l;
    l.project = "gpu study";
    l.entries.push_back(make_entry("t1", "model-training", TaskType::text_to_text, {{"gpu_hours", 10}}));
    std::string s = ethical_statement(build_report(l, cat(), {}, at(2025, 1, 1)));
    CHECK(s.find("consumed 4.200 kWh") != std::string::npos);
    CHECK(s.find("corresponding to 2.020 kgCO2e") != std::string::npos);
    CHECK(s.find("\"gpu study\"") != std::string::npos);

    Ledger empty;
    empty.project = "nothing";
    std::string z = ethical_statement(build_report(empty, cat(), {}, at(2025, 1, 1)));
    CHECK(z.find("consumed 0.000 kWh") != std::string::npos);
    CHECK(z.find("corresponding to 0.000 kgCO2e") != std::string::npos);
}

TEST_CASE("malformed machine reports are rejected")
{
    CHECK_THROWS_AS(parse_report("{}"), Error);
    CHECK_THROWS_AS(parse_report("nope"), Error);
}
