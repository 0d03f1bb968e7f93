#include "co2st/service.hpp"

#include "co2st/codec.hpp"
#include "co2st/error.hpp"
#include "co2st/ledger.hpp"
#include "co2st/report.hpp"
#include "json_util.hpp"

#include <httplib.h>

#include <algorithm>

namespace co2st {

namespace {

using jsonutil::json;
using jsonutil::ObjectReader;

constexpr std::string_view api_prefix = "/api/v1/";

ApiResponse ok(const json& body)
{
    return {200, body.dump() + "\n", "application/json"};
}

ApiResponse from_error(const Error& e)
{
    // Everything that reaches a handler as a parsed document is a validation
    // problem; only unparsable bodies are 400.
    return api_error(422, to_string(e.code()), e.what(), e.field());
}

std::optional<json> parse_body(const std::string& body)
{
    try {
        json doc = json::parse(body);
        if (!doc.is_object())
            return std::nullopt;
        return doc;
    }
    catch (const json::parse_error&) {
        return std::nullopt;
    }
}

bool is_route(const ApiRequest& r, std::string_view name)
{
    return r.path.size() == api_prefix.size() + name.size() && r.path.compare(0, api_prefix.size(), api_prefix) == 0 &&
           r.path.compare(api_prefix.size(), std::string::npos, name) == 0;
}

} // namespace

ApiResponse api_error(int status, std::string_view code, const std::string& message, const std::string& field)
{
    json body{
        {"status", status},
        {"code", code},
        {"message", message},
        {"field", field.empty() ? json(nullptr) : json(field)},
    };
    return {status, body.dump() + "\n", "application/json"};
}

Api::Api(Catalog catalog, EstimationConfig config) : catalog_(std::move(catalog)), config_(std::move(config))
{
    config_.validate();
}

ApiResponse Api::handle(const ApiRequest& request) const
{
    struct Route {
        std::string_view name;
        std::string_view method;
    };
    static constexpr Route routes[] = {
        {"phases", "GET"}, {"kinds", "GET"}, {"models", "GET"}, {"rules", "GET"}, {"estimate", "POST"}, {"report", "POST"},
    };

    const Route* route = nullptr;
    for (const Route& r : routes) {
        if (is_route(request, r.name))
            route = &r;
    }
    if (!route)
        return api_error(404, "not-found", "no route for " + request.path);
    if (request.method != route->method)
        return api_error(405, "method-not-allowed", std::string(route->name) + " expects " + std::string(route->method));

    try {
        if (route->name == "phases") {
            json out = json::array();
            for (ResearchPhase p : catalog_.phases())
                out.push_back({{"id", to_string(p)}, {"display_name", display_name(p)}});
            return ok(out);
        }
        if (route->name == "models") {
            json out = json::array();
            for (const TaskInfo& t : catalog_.tasks())
                out.push_back(codec::to_json(t));
            return ok(out);
        }
        if (route->name == "rules") {
            json out = json::array();
            for (const MitigationRule& r : mitigation_rules())
                out.push_back({{"rule_id", r.id}, {"severity", to_string(r.severity)}, {"title", r.title}, {"advice", r.advice}});
            return ok(out);
        }
        if (route->name == "kinds")
            return kinds(request);
        if (route->name == "estimate")
            return estimate(request);
        return report(request);
    }
    catch (const Error& e) {
        return from_error(e);
    }
}

ApiResponse Api::kinds(const ApiRequest& request) const
{
    json out = json::array();
    auto it = request.query.find("phase");
    if (it == request.query.end()) {
        for (const UseKind& k : catalog_.kinds())
            out.push_back(codec::to_json(k));
        return ok(out);
    }
    ResearchPhase phase = phase_from_string(it->second, "phase");
    for (const UseKind* k : catalog_.kinds_for_phase(phase))
        out.push_back(codec::to_json(*k));
    return ok(out);
}

ApiResponse Api::estimate(const ApiRequest& request) const
{
    auto doc = parse_body(request.body);
    if (!doc)
        return api_error(400, "malformed-body", "request body must be a JSON object");

    ObjectReader r(*doc, "");
    UseCaseEntry entry;
    entry.phase = phase_from_string(r.require_string("phase"), "phase");
    const UseKind& kind = catalog_.kind(r.require_string("kind"));
    entry.kind = kind.id;

    std::vector<std::string> notes;
    if (const json* task = r.optional("task"))
        entry.task = resolve_task(ObjectReader::as_string(*task, "task"), catalog_, &notes);
    else if (kind.locked())
        entry.task = kind.allowed_tasks.front();
    else
        throw Error(ErrorCode::missing_required_field, "task", "kind \"" + kind.id + "\" needs a task");

    if (const json* params = r.optional("params")) {
        if (!params->is_object())
            jsonutil::schema_error("params", "expected an object of numbers");
        for (auto it = params->begin(); it != params->end(); ++it)
            entry.params[it.key()] = ObjectReader::as_number(it.value(), it.key());
    }
    if (const json* note = r.optional("note"))
        entry.note = ObjectReader::as_string(*note, "note");
    r.finish();

    Estimate e = estimate_use_case(validate_entry(entry, catalog_), config_);
    e.assumptions.insert(e.assumptions.begin(), notes.begin(), notes.end());
    return ok(codec::to_json(e));
}

ApiResponse Api::report(const ApiRequest& request) const
{
    if (!parse_body(request.body))
        return api_error(400, "malformed-body", "request body must be a ledger document");
    Ledger ledger = parse_ledger(request.body, catalog_);

    Timestamp generated_at = now_utc();
    if (auto it = request.query.find("generated_at"); it != request.query.end())
        generated_at = parse_timestamp(it->second, "generated_at");
    Report rep = build_report(ledger, catalog_, config_, generated_at);
    return {200, render(rep, RenderFormat::machine), "application/json"};
}

struct Server::Impl {
    Api api;
    ServerOptions options;
    httplib::Server http;
    int bound_port = -1;

    Impl(Api a, ServerOptions o) : api(std::move(a)), options(std::move(o)) {}

    void apply_cors(const httplib::Request& req, httplib::Response& res) const
    {
        std::string origin = req.get_header_value("Origin");
        if (origin.empty())
            return;
        const auto& allowed = options.cors_origins;
        bool any = std::find(allowed.begin(), allowed.end(), "*") != allowed.end();
        if (any || std::find(allowed.begin(), allowed.end(), origin) != allowed.end()) {
            res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
            res.set_header("Vary", "Origin");
        }
    }

    void dispatch(const httplib::Request& req, httplib::Response& res) const
    {
        apply_cors(req, res);
        if (req.method == "OPTIONS") {
            res.status = 204;
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            return;
        }
        ApiRequest request{req.method, req.path, {}, req.body};
        for (const auto& [k, v] : req.params)
            request.query.emplace(k, v);
        ApiResponse response = api.handle(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    }
};

Server::Server(Api api, ServerOptions options) : impl_(std::make_unique<Impl>(std::move(api), std::move(options)))
{
    Impl& impl = *impl_;
    impl.http.set_payload_max_length(impl.options.max_body_bytes);

    auto handler = [&impl](const httplib::Request& req, httplib::Response& res) { impl.dispatch(req, res); };
    impl.http.Get(".*", handler);
    impl.http.Post(".*", handler);
    impl.http.Put(".*", handler);
    impl.http.Delete(".*", handler);
    impl.http.Patch(".*", handler);
    impl.http.Options(".*", handler);

    // Errors raised by httplib itself (oversized bodies, unparsable requests).
    impl.http.set_error_handler([&impl](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty())
            return httplib::Server::HandlerResponse::Unhandled;
        impl.apply_cors(req, res);
        ApiResponse err = res.status == 413
                              ? api_error(413, "payload-too-large",
                                          "request body exceeds " + std::to_string(impl.options.max_body_bytes) + " bytes")
                              : api_error(res.status, "http-error", httplib::status_message(res.status));
        res.set_content(err.body, err.content_type);
        return httplib::Server::HandlerResponse::Handled;
    });
}

Server::~Server()
{
    stop();
}

int Server::bind()
{
    Impl& impl = *impl_;
    if (impl.options.port == 0)
        impl.bound_port = impl.http.bind_to_any_port(impl.options.bind);
    else
        impl.bound_port = impl.http.bind_to_port(impl.options.bind, impl.options.port) ? impl.options.port : -1;
    if (impl.bound_port < 0)
        throw Error(ErrorCode::io, "bind",
                    "cannot bind " + impl.options.bind + ":" + std::to_string(impl.options.port));
    return impl.bound_port;
}

void Server::listen()
{
    impl_->http.listen_after_bind();
}

void Server::stop()
{
    if (impl_)
        impl_->http.stop();
}

void Server::wait_until_ready() const
{
    impl_->http.wait_until_ready();
}

} // namespace co2st
