#include "co2st/error.hpp"
#include "co2st/ledger.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>

using namespace co2st;
using namespace co2st::testing;

namespace {

const Catalog& cat()
{
    return builtin_catalog();
}

bool close(double a, double b, double rel)
{
    return std::fabs(a - b) <= rel * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

Error caught(auto&& fn)
{
    try {
        fn();
    }
    catch (const Error& e) {
        return e;
    }
    FAIL("expected co2st::Error");
    return Error(ErrorCode::schema, "", "");
}

Ledger sample()
{
    Ledger l;
    l.project = "sample";
    l = add_entry(l, make_entry("a1", "literature-review", TaskType::text_to_text, {{"article_count", 10}}), cat());
    l = add_entry(l, make_entry("b2", "transcription", TaskType::audio_to_text, {{"minutes", 90}}), cat());
    l = add_entry(l, make_entry("c3", "fine-tuning", TaskType::text_to_text, {{"gpu_hours", 10}}), cat());
    return l;
}

} // namespace

TEST_CASE("entry ids are 12 hex digits and distinct")
{
    std::regex hex("[0-9a-f]{12}");
    std::set<std::string> seen;
    for (int i = 0; i < 1000; ++i) {
        std::string id = generate_entry_id();
        CHECK(std::regex_match(id, hex));
        seen.insert(id);
    }
    CHECK(seen.size() == 1000);
}

TEST_CASE("timestamps round-trip in RFC 3339 UTC")
{
    Timestamp t = at(2025, 3, 1, 12, 4, 5);
    CHECK(format_timestamp(t) == "2025-03-01T12:04:05Z");
    CHECK(parse_timestamp("2025-03-01T12:04:05Z") == t);
    for (const char* bad : {"2025-03-01", "2025-03-01T12:04:05", "2025-13-01T00:00:00Z", "2025-02-30T00:00:00Z",
                            "2025-03-01T24:00:00Z", "2025-03-01 12:04:05Z"})
        CHECK_THROWS_AS(parse_timestamp(bad), Error);
}

TEST_CASE("add and remove")
{
    Ledger l = sample();
    REQUIRE(l.entries.size() == 3);
    CHECK(l.entries[1].id == "b2");

    Error dup = caught([&] { add_entry(l, make_entry("a1", "transcription", TaskType::audio_to_text, {{"minutes", 1}}), cat()); });
    CHECK(dup.code() == ErrorCode::duplicate_id);

    Ledger removed = remove_entry(l, "b2");
    CHECK(removed.entries.size() == 2);
    CHECK(removed.entries[0].id == "a1");
    CHECK(removed.entries[1].id == "c3");
    CHECK(caught([&] { remove_entry(l, "zz"); }).code() == ErrorCode::unknown_id);
}

TEST_CASE("adding rejects invalid entries")
{
    UseCaseEntry wrong_phase = make_entry("x", "transcription", TaskType::audio_to_text, {{"minutes", 1}});
    wrong_phase.phase = ResearchPhase::research_planning;
    Error e = caught([&] { add_entry({}, wrong_phase, cat()); });
    CHECK(e.code() == ErrorCode::phase_mismatch);
    CHECK(e.field() == "phase");

    Error locked = caught([&] {
        add_entry({}, make_entry("x", "customized-chatbot", TaskType::text_to_image, {}), cat());
    });
    CHECK(locked.code() == ErrorCode::task_not_allowed);
    CHECK(locked.field() == "task");
}

TEST_CASE("total sums entries in order")
{
    Ledger l = sample();
    LedgerTotal t = total(l, cat(), {});
    REQUIRE(t.breakdown.size() == 3);
    double sum = t.breakdown[0].estimate.energy.value() + t.breakdown[1].estimate.energy.value() +
                 t.breakdown[2].estimate.energy.value();
    CHECK(t.total.energy.value() == sum);
    CHECK(close(t.total.energy.value(), 0.5622e-3 + 5.7015e-4 + 4.2, 1e-12));
    CHECK(close(t.total.carbon.value(), 0.481 * t.total.energy.value(), 1e-12));
    CHECK(t.breakdown[0].base_count == 120.0);
    CHECK(t.breakdown[2].base_count == 10.0);

    // assumptions appear once each
    std::set<std::string> unique(t.total.assumptions.begin(), t.total.assumptions.end());
    CHECK(unique.size() == t.total.assumptions.size());

    LedgerTotal empty = total(Ledger{}, cat(), {});
    CHECK(empty.total.energy.value() == 0.0);
    CHECK(empty.breakdown.empty());
}

TEST_CASE("total is permutation invariant and additive over concatenation")
{
    std::mt19937_64 rng(99);
    for (int round = 0; round < 50; ++round) {
        Ledger a = random_ledger(rng, 1 + round % 20);
        Ledger shuffled = a;
        std::shuffle(shuffled.entries.begin(), shuffled.entries.end(), rng);
        double ea = total(a, cat(), {}).total.energy.value();
        CHECK(close(total(shuffled, cat(), {}).total.energy.value(), ea, 1e-9));

        Ledger b = random_ledger(rng, 5);
        for (auto& e : b.entries)
            e.id = "b" + e.id.substr(1);
        Ledger joined = a;
        joined.entries.insert(joined.entries.end(), b.entries.begin(), b.entries.end());
        double eb = total(b, cat(), {}).total.energy.value();
        CHECK(close(total(joined, cat(), {}).total.energy.value(), ea + eb, 1e-12));
    }
}

TEST_CASE("serialization round-trips")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Ledger l = random_ledger(rng, i % 12, "project " + std::to_string(i));
        if (!l.entries.empty())
            l.entries.front().note = "with \"quotes\" and unicode é";
        std::string text = serialize_ledger(l);
        Ledger back = parse_ledger(text, cat());
        CHECK(back == l);
        CHECK(serialize_ledger(back) == text);
    }
}

TEST_CASE("serialized form is stable")
{
    Ledger l;
    l.project = "demo";
    l.entries.push_back(make_entry("0123456789ab", "transcription", TaskType::audio_to_text, {{"minutes", 90}}));
    CHECK(serialize_ledger(l) == R"({
  "format_version": 1,
  "project": "demo",
  "entries": [
    {
      "id": "0123456789ab",
      "phase": "data-collection",
      "kind": "transcription",
      "task": "audio-to-text",
      "params": {
        "minutes": 90
      },
      "note": "",
      "created_at": "2025-03-01T12:00:00Z"
    }
  ]
}
)");
}

TEST_CASE("parse errors name the field")
{
    Error version = caught([] { parse_ledger(R"({"format_version": 999, "project": "x", "entries": []})", cat()); });
    CHECK(version.code() == ErrorCode::unsupported_version);

    Error missing = caught([] {
        parse_ledger(R"({"format_version": 1, "project": "x", "entries": [
            {"id": "a", "kind": "transcription", "task": "audio-to-text", "params": {"minutes": 1},
             "created_at": "2025-03-01T12:00:00Z"}]})",
                     cat());
    });
    CHECK(missing.code() == ErrorCode::schema);
    CHECK(missing.field().find("phase") != std::string::npos);

    Error range = caught([] {
        parse_ledger(R"({"format_version": 1, "project": "x", "entries": [
            {"id": "a", "phase": "data-collection", "kind": "transcription", "task": "audio-to-text",
             "params": {"minutes": -4}, "created_at": "2025-03-01T12:00:00Z"}]})",
                     cat());
    });
    CHECK(range.code() == ErrorCode::out_of_range);
    CHECK(range.field() == "entries[0].params.minutes");

    Error task = caught([] {
        parse_ledger(R"({"format_version": 1, "project": "x", "entries": [
            {"id": "a", "phase": "prototyping-building", "kind": "customized-chatbot", "task": "text-to-image",
             "params": {}, "created_at": "2025-03-01T12:00:00Z"}]})",
                     cat());
    });
    CHECK(task.code() == ErrorCode::task_not_allowed);
    CHECK(task.field() == "entries[0].task");

    Error extra = caught([] { parse_ledger(R"({"format_version": 1, "project": "x", "entries": [], "x": 1})", cat()); });
    CHECK(extra.code() == ErrorCode::schema);

    Error dup = caught([] {
        parse_ledger(R"({"format_version": 1, "project": "x", "entries": [
            {"id": "a", "phase": "data-collection", "kind": "transcription", "task": "audio-to-text",
             "params": {"minutes": 4}, "created_at": "2025-03-01T12:00:00Z"},
            {"id": "a", "phase": "data-collection", "kind": "transcription", "task": "audio-to-text",
             "params": {"minutes": 4}, "created_at": "2025-03-01T12:00:00Z"}]})",
                     cat());
    });
    CHECK(dup.code() == ErrorCode::duplicate_id);

    CHECK(caught([] { parse_ledger("{\"format_version\": 1,", cat()); }).code() == ErrorCode::schema);
}

TEST_CASE("save and load through the file system")
{
    auto dir = std::filesystem::temp_directory_path() / ("co2st-ledger-" + generate_entry_id());
    std::filesystem::create_directories(dir);
    std::string path = (dir / "ledger.json").string();
    Ledger l = sample();
    save_ledger(l, path);
    CHECK(load_ledger(path, cat()) == l);
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    CHECK(caught([&] { load_ledger((dir / "missing.json").string(), cat()); }).is_io());
    std::filesystem::remove_all(dir);
}
