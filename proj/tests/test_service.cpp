#include "co2st/error.hpp"
#include "co2st/ledger.hpp"
#include "co2st/service.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

using namespace co2st;
using nlohmann::json;

namespace {

const Api& api()
{
    static const Api instance(builtin_catalog(), EstimationConfig{});
    return instance;
}

ApiResponse get(const std::string& path, std::map<std::string, std::string> query = {})
{
    return api().handle({"GET", path, std::move(query), ""});
}

ApiResponse post(const std::string& path, const std::string& body, std::map<std::string, std::string> query = {})
{
    return api().handle({"POST", path, std::move(query), body});
}

std::string slurp(const std::string& rel)
{
    std::ifstream in(std::string(CO2ST_TEST_DATA) + "/" + rel, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class RunningServer {
public:
    explicit RunningServer(ServerOptions options)
        : server_(Api(builtin_catalog(), EstimationConfig{}), [&] {
              options.port = 0;
              return options;
          }())
    {
        port_ = server_.bind();
        thread_ = std::thread([this] { server_.listen(); });
        server_.wait_until_ready();
    }
    ~RunningServer()
    {
        server_.stop();
        thread_.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

private:
    Server server_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace

TEST_CASE("catalog routes")
{
    ApiResponse phases = get("/api/v1/phases");
    CHECK(phases.status == 200);
    json p = json::parse(phases.body);
    REQUIRE(p.size() == 7);
    CHECK(p[0]["id"] == "research-planning");

    json models = json::parse(get("/api/v1/models").body);
    REQUIRE(models.size() == 13);
    CHECK(models[0]["id"] == "text-to-text");
    CHECK(models[0]["energy_wh"] == 0.004685);
    CHECK(models[0]["energy_wh_literal"] == "0.004685");
    CHECK(models[0]["canonical_unit"] == "prompt");

    json kinds = json::parse(get("/api/v1/kinds", {{"phase", "training-fine-tuning"}}).body);
    REQUIRE(kinds.size() == 2);
    CHECK(kinds[0]["id"] == "model-training");
    CHECK(kinds[0]["method"] == "hardware");
    CHECK(json::parse(get("/api/v1/kinds").body).size() == builtin_catalog().kinds().size());

    json rules = json::parse(get("/api/v1/rules").body);
    REQUIRE(rules.size() == 4);
    CHECK(rules[3]["rule_id"] == "R4");
}

TEST_CASE("estimate route")
{
    ApiResponse r = post("/api/v1/estimate",
                         R"({"phase": "data-collection", "kind": "transcription", "params": {"minutes": 90}})");
    REQUIRE(r.status == 200);
    json e = json::parse(r.body);
    CHECK(e["unit_count"] == 90.0);
    CHECK(std::fabs(e["carbon_kg"].get<double>() - 2.7424215e-4) < 1e-16);
    CHECK(e["equivalencies"].contains("car_km"));

    json reduced = json::parse(post("/api/v1/estimate", R"({"phase": "analysis-synthesis",
        "kind": "data-trend-identification", "task": "text+image-to-text", "params": {"prompts": 4}})")
                                   .body);
    CHECK(reduced["assumptions"][0] == "text+image-to-text reduced to image-to-text (heaviest input modality)");
}

TEST_CASE("validation errors are 422 and name the field")
{
    ApiResponse locked = post("/api/v1/estimate", R"({"phase": "prototyping-building", "kind": "customized-chatbot",
                                                     "task": "text-to-image", "params": {}})");
    CHECK(locked.status == 422);
    json err = json::parse(locked.body);
    CHECK(err["status"] == 422);
    CHECK(err["code"] == "task-not-allowed");
    CHECK(err["field"] == "task");

    json range = json::parse(post("/api/v1/estimate", R"({"phase": "data-collection", "kind": "transcription",
                                                         "params": {"minutes": -1}})")
                                 .body);
    CHECK(range["field"] == "minutes");

    json missing = json::parse(post("/api/v1/estimate", R"({"kind": "transcription"})").body);
    CHECK(missing["field"] == "phase");

    ApiResponse phase = get("/api/v1/kinds", {{"phase", "nope"}});
    CHECK(phase.status == 422);
    CHECK(json::parse(phase.body)["field"] == "phase");
}

TEST_CASE("malformed bodies, unknown routes and wrong methods")
{
    ApiResponse bad = post("/api/v1/estimate", "{not json");
    CHECK(bad.status == 400);
    CHECK(json::parse(bad.body)["code"] == "malformed-body");
    CHECK(post("/api/v1/estimate", "[1]").status == 400);
    CHECK(post("/api/v1/report", "").status == 400);

    ApiResponse missing = get("/api/v1/nothing");
    CHECK(missing.status == 404);
    CHECK(json::parse(missing.body)["field"].is_null());
    CHECK(get("/api/v2/phases").status == 404);
    CHECK(get("/api/v1/estimate").status == 405);
    CHECK(post("/api/v1/phases", "{}").status == 405);
}

TEST_CASE("report route matches the machine golden")
{
    ApiResponse r = post("/api/v1/report", slurp("fixtures/thesis.json"), {{"generated_at", "2025-04-01T00:00:00Z"}});
    CHECK(r.status == 200);
    CHECK(r.body == slurp("golden/thesis_report.json"));

    ApiResponse version = post("/api/v1/report", R"({"format_version": 999, "project": "x", "entries": []})");
    CHECK(version.status == 422);
    CHECK(json::parse(version.body)["code"] == "unsupported-version");
}

TEST_CASE("HTTP transport")
{
    ServerOptions options;
    options.cors_origins = {"http://localhost:5173"};
    RunningServer server(options);
    httplib::Client c = server.client();

    auto phases = c.Get("/api/v1/phases");
    REQUIRE(phases);
    CHECK(phases->status == 200);
    CHECK(phases->get_header_value("Content-Type") == "application/json");
    CHECK(phases->body == get("/api/v1/phases").body);

    auto t0 = std::chrono::steady_clock::now();
    auto est = c.Post("/api/v1/estimate",
                      R"({"phase": "research-planning", "kind": "literature-review", "params": {"article_count": 10}})",
                      "application/json");
    auto elapsed = std::chrono::steady_clock::now() - t0;
    REQUIRE(est);
    CHECK(est->status == 200);
    CHECK(json::parse(est->body)["unit_count"] == 120.0);
    CHECK(elapsed < std::chrono::milliseconds(100));

    auto nf = c.Get("/nowhere");
    REQUIRE(nf);
    CHECK(nf->status == 404);
    CHECK(json::parse(nf->body)["code"] == "not-found");

    auto put = c.Put("/api/v1/estimate", "{}", "application/json");
    REQUIRE(put);
    CHECK(put->status == 405);

    std::string big(options.max_body_bytes + 1, ' ');
    auto large = c.Post("/api/v1/report", big, "application/json");
    REQUIRE(large);
    CHECK(large->status == 413);
    CHECK(json::parse(large->body)["code"] == "payload-too-large");
}

TEST_CASE("CORS headers for allowed origins only")
{
    ServerOptions options;
    options.cors_origins = {"http://localhost:5173"};
    RunningServer server(options);
    httplib::Client c = server.client();

    auto allowed = c.Get("/api/v1/phases", {{"Origin", "http://localhost:5173"}});
    REQUIRE(allowed);
    CHECK(allowed->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");

    auto other = c.Get("/api/v1/phases", {{"Origin", "http://evil.example"}});
    REQUIRE(other);
    CHECK_FALSE(other->has_header("Access-Control-Allow-Origin"));

    auto preflight = c.Options("/api/v1/estimate", {{"Origin", "http://localhost:5173"}});
    REQUIRE(preflight);
    CHECK(preflight->status == 204);
    CHECK(preflight->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
}

TEST_CASE("bind failure is an io error")
{
    ServerOptions options;
    options.bind = "203.0.113.1";
    options.port = 1;
    Server s(Api(builtin_catalog(), EstimationConfig{}), options);
    CHECK_THROWS_AS(s.bind(), co2st::Error);
}
