#include "co2st/catalog.hpp"
#include "co2st/cli.hpp"
#include "co2st/ledger.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace co2st;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "co2st");
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& rel)
{
    return std::string(CO2ST_TEST_DATA) + "/" + rel;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path = fs::temp_directory_path() / ("co2st-cli-" + generate_entry_id());
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct FixedClock {
    FixedClock() { ::setenv(now_env_var, "2025-04-01T00:00:00Z", 1); }
    ~FixedClock() { ::unsetenv(now_env_var); }
};

} // namespace

TEST_CASE("listing commands match goldens")
{
    Run models = cli({"models"});
    CHECK(models.code == 0);
    CHECK(models.out == slurp(data("golden/models.txt")));
    Run phases = cli({"phases"});
    CHECK(phases.code == 0);
    CHECK(phases.out == slurp(data("golden/phases.txt")));

    Run kinds = cli({"kinds", "--phase", "research-planning"});
    CHECK(kinds.code == 0);
    CHECK(kinds.out.find("literature-review locked:text-to-text params:article_count*,words_per_article=6000") !=
          std::string::npos);
    CHECK(cli({"kinds", "--phase", "nope"}).code == 1);
}

TEST_CASE("report goldens")
{
    FixedClock clock;
    std::string ledger = data("fixtures/thesis.json");
    CHECK(cli({"report", "--ledger", ledger}).out == slurp(data("golden/thesis_report.txt")));
    CHECK(cli({"report", "--ledger", ledger, "--format", "machine"}).out == slurp(data("golden/thesis_report.json")));
    CHECK(cli({"report", "--ledger", ledger, "--format", "ethics"}).out == slurp(data("golden/thesis_ethics.txt")));
    CHECK(cli({"report", "--ledger", data("fixtures/empty.json")}).out == slurp(data("golden/empty_report.txt")));
}

TEST_CASE("estimate prints the worked example")
{
    Run r = cli({"estimate", "--phase", "data-collection", "--kind", "transcription", "--param", "minutes=90"});
    CHECK(r.code == 0);
    CHECK(r.out.find("N = 90.00 minute-of-audio\n") != std::string::npos);
    CHECK(r.out.find("C = 2.742e-4 kg CO2e\n") != std::string::npos);

    Run lit = cli({"estimate", "--phase", "research-planning", "--kind", "literature-review", "--param",
                   "article_count=10", "--format", "machine"});
    CHECK(lit.code == 0);
    CHECK(lit.out.find("\"unit_count\": 120.0") != std::string::npos);

    Run reduced = cli({"estimate", "--phase", "prototyping-building", "--kind", "prototype-content-generation",
                       "--model", "text+image-to-image", "--param", "outputs=3"});
    CHECK(reduced.code == 0);
    CHECK(reduced.out.find("reduced to image-to-image") != std::string::npos);
}

TEST_CASE("add, remove and report through a ledger file")
{
    FixedClock clock;
    TempDir dir;
    std::string ledger = dir.file("study.json");

    Run a = cli({"add", "--ledger", ledger, "--phase", "research-planning", "--kind", "literature-review", "--param",
                 "article_count=10", "--note", "survey"});
    REQUIRE(a.code == 0);
    std::string first = a.out.substr(0, a.out.size() - 1);
    CHECK(first.size() == 12);

    Run b = cli({"add", "--ledger", ledger, "--phase", "data-collection", "--kind", "transcription", "--param",
                 "minutes=90"});
    REQUIRE(b.code == 0);

    Ledger l = load_ledger(ledger, builtin_catalog());
    CHECK(l.project == "study");
    REQUIRE(l.entries.size() == 2);
    CHECK(l.entries[0].id == first);
    CHECK(l.entries[0].note == "survey");
    CHECK(format_timestamp(l.entries[0].created_at) == "2025-04-01T00:00:00Z");

    CHECK(cli({"remove", "--ledger", ledger, "--id", first}).code == 0);
    CHECK(load_ledger(ledger, builtin_catalog()).entries.size() == 1);
    Run again = cli({"remove", "--ledger", ledger, "--id", first});
    CHECK(again.code == 1);
    CHECK(again.err.find("error: ") == 0);
    CHECK_FALSE(fs::exists(ledger + ".lock"));
}

TEST_CASE("validation failures exit 1 with a single-line message")
{
    TempDir dir;
    std::string ledger = dir.file("l.json");
    Run locked = cli({"add", "--ledger", ledger, "--phase", "prototyping-building", "--kind", "customized-chatbot",
                      "--model", "text-to-image"});
    CHECK(locked.code == 1);
    CHECK(locked.err.find("text-to-text") != std::string::npos);
    CHECK(std::count(locked.err.begin(), locked.err.end(), '\n') == 1);
    CHECK_FALSE(fs::exists(ledger));

    Run missing_model = cli({"estimate", "--phase", "research-planning", "--kind", "study-material-generation",
                             "--param", "outputs=1"});
    CHECK(missing_model.code == 1);
    CHECK(missing_model.err.find("--model") != std::string::npos);

    Run bad_param = cli({"estimate", "--phase", "data-collection", "--kind", "transcription", "--param", "minutes=ten"});
    CHECK(bad_param.code == 1);
    CHECK(bad_param.err.find("minutes") != std::string::npos);

    Run negative = cli({"estimate", "--phase", "data-collection", "--kind", "transcription", "--param", "minutes=-5"});
    CHECK(negative.code == 1);
    CHECK(negative.err.find("minutes") != std::string::npos);

    Run phase = cli({"estimate", "--phase", "research-planning", "--kind", "transcription", "--param", "minutes=5"});
    CHECK(phase.code == 1);
    CHECK(phase.err.find("phase") != std::string::npos);

    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"report"}).code == 1);
}

TEST_CASE("io failures exit 2")
{
    TempDir dir;
    CHECK(cli({"report", "--ledger", dir.file("absent.json")}).code == 2);
    CHECK(cli({"--config", dir.file("absent-config.json"), "models"}).code == 2);

    std::ofstream(dir.file("broken.json")) << "{\"format_version\": 1,";
    Run broken = cli({"report", "--ledger", dir.file("broken.json")});
    CHECK(broken.code == 1);
    CHECK(broken.err.find("line") != std::string::npos);
}

TEST_CASE("config file changes carbon intensity")
{
    TempDir dir;
    std::ofstream(dir.file("cfg.json")) << R"({"format_version": 1, "carbon_intensity": 0.1})";
    Run r = cli({"--config", dir.file("cfg.json"), "estimate", "--phase", "data-collection", "--kind",
                 "transcription", "--param", "minutes=1000", "--format", "machine"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"carbon_kg\": 0.0006335") != std::string::npos);
}
