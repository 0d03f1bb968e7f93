#include "co2st/cli.hpp"

#include "co2st/codec.hpp"
#include "co2st/config.hpp"
#include "co2st/error.hpp"
#include "co2st/ledger.hpp"
#include "co2st/numfmt.hpp"
#include "co2st/report.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <filesystem>
#include <optional>
#include <ostream>
#include <unistd.h>

namespace co2st {

namespace {

struct UseCaseArgs {
    std::string phase;
    std::string kind;
    std::string model;
    std::vector<std::string> params;
    std::string note;
};

// Advisory lock: a sibling "<ledger>.lock" file created exclusively.
class LedgerLock {
public:
    explicit LedgerLock(std::string ledger_path) : path_(std::move(ledger_path) + ".lock")
    {
        int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0) {
            if (errno == EEXIST)
                throw Error(ErrorCode::io, path_,
                            "ledger is locked by another process (remove " + path_ + " if it is stale)");
            throw Error(ErrorCode::io, path_, "cannot create lock file " + path_ + ": " + std::strerror(errno));
        }
        std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
        ::close(fd);
    }
    ~LedgerLock() { ::unlink(path_.c_str()); }

    LedgerLock(const LedgerLock&) = delete;
    LedgerLock& operator=(const LedgerLock&) = delete;

private:
    std::string path_;
};

std::optional<std::string> env(const char* name)
{
    const char* v = std::getenv(name);
    if (!v || !*v)
        return std::nullopt;
    return std::string(v);
}

Timestamp current_time()
{
    if (auto injected = env(now_env_var))
        return parse_timestamp(*injected, now_env_var);
    return now_utc();
}

struct Context {
    std::string config_path;
    std::string catalog_path;
    std::optional<Catalog> overlay;
    AppConfig config;

    const Catalog& catalog() const { return overlay ? *overlay : builtin_catalog(); }

    void load()
    {
        std::string cfg = !config_path.empty() ? config_path : env(config_env_var).value_or("");
        if (!cfg.empty())
            config = load_config(cfg);
        std::string cat = !catalog_path.empty() ? catalog_path : env(catalog_env_var).value_or("");
        if (!cat.empty())
            overlay = load_catalog_overlay(builtin_catalog(), cat);
    }
};

ParamMap parse_params(const std::vector<std::string>& pairs)
{
    ParamMap out;
    for (const std::string& pair : pairs) {
        auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(ErrorCode::schema, "param", "--param expects key=value, got \"" + pair + "\"");
        std::string key = pair.substr(0, eq);
        std::string text = pair.substr(eq + 1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
            throw Error(ErrorCode::schema, key, "parameter \"" + key + "\" is not a number: \"" + text + "\"");
        if (!out.emplace(key, value).second)
            throw Error(ErrorCode::schema, key, "parameter \"" + key + "\" given more than once");
    }
    return out;
}

// Builds an unsaved entry from command-line arguments; validates it fully.
UseCaseEntry make_entry(const UseCaseArgs& args, const Catalog& catalog, std::vector<std::string>& notes)
{
    UseCaseEntry entry;
    entry.phase = phase_from_string(args.phase);
    const UseKind& kind = catalog.kind(args.kind);
    entry.kind = kind.id;
    if (!args.model.empty()) {
        entry.task = resolve_task(args.model, catalog, &notes);
    }
    else if (kind.locked()) {
        entry.task = kind.allowed_tasks.front();
    }
    else {
        std::string allowed;
        for (TaskType t : kind.allowed_tasks)
            allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(t));
        throw Error(ErrorCode::missing_required_field, "model",
                    "kind \"" + kind.id + "\" needs --model (one of: " + allowed + ")");
    }
    entry.params = parse_params(args.params);
    entry.note = args.note;
    entry.created_at = current_time();
    validate_entry(entry, catalog);
    return entry;
}

void add_use_case_options(CLI::App* cmd, UseCaseArgs& args)
{
    cmd->add_option("--phase", args.phase, "Research phase id")->required();
    cmd->add_option("--kind", args.kind, "Use kind id")->required();
    cmd->add_option("--model", args.model, "Task type id or modality expression such as text+image-to-image");
    cmd->add_option("--param", args.params, "Parameter as key=value; repeatable")->allow_extra_args(false);
    cmd->add_option("--note", args.note, "Free-text note");
}

std::string single_line(std::string s)
{
    for (char& c : s) {
        if (c == '\n' || c == '\r')
            c = ' ';
    }
    return s;
}

void print_estimate_text(std::ostream& out, const Estimate& e, const TaskInfo& task, bool hardware)
{
    out << "N = " << format_sig(e.unit_count.value()) << ' '
        << (hardware ? std::string("gpu-hour") : std::string(to_string(task.canonical_unit))) << '\n';
    out << "E = " << format_sig(e.energy.value()) << " kWh\n";
    out << "C = " << format_sig(e.carbon.value()) << " kg CO2e\n";
    out << "  " << format_sig(e.equivalencies.car_km) << " km driven in a gasoline-powered car\n";
    out << "  " << format_sig(e.equivalencies.flight_minutes) << " minutes as a passenger on a commercial airplane\n";
    out << "  " << format_sig(e.equivalencies.tree_seedlings) << " tree seedlings grown for 10 years\n";
    out << "Assumptions:\n";
    for (const std::string& a : e.assumptions)
        out << "  - " << a << '\n';
}

} // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Estimate the energy use and carbon footprint of generative AI in research"};
    app.name(argv.empty() ? "co2st" : std::filesystem::path(argv.front()).filename().string());
    app.require_subcommand(1);

    Context ctx;
    app.add_option("--config", ctx.config_path, "Config file (default: $CO2ST_CONFIG or built-in values)");
    app.add_option("--catalog", ctx.catalog_path, "Catalog overlay file (default: $CO2ST_CATALOG)");

    auto* phases_cmd = app.add_subcommand("phases", "List research phases");
    auto* models_cmd = app.add_subcommand("models", "List task types with per-unit energy (Wh)");

    std::string kinds_phase;
    auto* kinds_cmd = app.add_subcommand("kinds", "List use kinds of a phase");
    kinds_cmd->add_option("--phase", kinds_phase, "Research phase id")->required();

    std::string ledger_path;
    UseCaseArgs add_args;
    auto* add_cmd = app.add_subcommand("add", "Append a use case to a ledger file");
    add_cmd->add_option("--ledger", ledger_path, "Ledger file")->required();
    add_use_case_options(add_cmd, add_args);

    std::string remove_id;
    auto* remove_cmd = app.add_subcommand("remove", "Remove a use case from a ledger file");
    remove_cmd->add_option("--ledger", ledger_path, "Ledger file")->required();
    remove_cmd->add_option("--id", remove_id, "Entry id")->required();

    std::string report_format = "text";
    auto* report_cmd = app.add_subcommand("report", "Report ledger totals");
    report_cmd->add_option("--ledger", ledger_path, "Ledger file")->required();
    report_cmd->add_option("--format", report_format, "text, machine or ethics")
        ->check(CLI::IsMember({"text", "machine", "ethics"}));

    UseCaseArgs estimate_args;
    std::string estimate_format = "text";
    auto* estimate_cmd = app.add_subcommand("estimate", "Estimate a single use case without a ledger");
    add_use_case_options(estimate_cmd, estimate_args);
    estimate_cmd->add_option("--format", estimate_format, "text or machine")->check(CLI::IsMember({"text", "machine"}));

    std::vector<const char*> raw;
    raw.reserve(argv.size() + 1);
    if (argv.empty())
        raw.push_back("co2st");
    for (const std::string& a : argv)
        raw.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << single_line(e.what()) << '\n';
        return exit_validation;
    }

    try {
        ctx.load();
        const Catalog& catalog = ctx.catalog();
        const EstimationConfig& config = ctx.config.estimation;

        if (*phases_cmd) {
            for (ResearchPhase p : catalog.phases())
                out << to_string(p) << ' ' << display_name(p) << '\n';
        }
        else if (*models_cmd) {
            for (const TaskInfo& t : catalog.tasks())
                out << to_string(t.id) << ' ' << t.energy_literal << ' ' << to_string(t.canonical_unit) << ' '
                    << t.proxy_model << '\n';
        }
        else if (*kinds_cmd) {
            ResearchPhase phase = phase_from_string(kinds_phase);
            for (const UseKind* k : catalog.kinds_for_phase(phase)) {
                std::string tasks;
                for (TaskType t : k->allowed_tasks)
                    tasks += (tasks.empty() ? "" : ",") + std::string(to_string(t));
                std::string fields;
                for (const FieldSpec& f : k->parameter_schema) {
                    fields += (fields.empty() ? "" : ",") + f.id;
                    if (f.required)
                        fields += "*";
                    else if (auto d = k->defaults.find(f.id); d != k->defaults.end())
                        fields += "=" + format_shortest(d->second);
                }
                out << k->id << ' ' << (k->locked() ? "locked:" : "tasks:") << tasks << " params:" << fields << ' '
                    << k->display_name << '\n';
            }
        }
        else if (*add_cmd) {
            LedgerLock lock(ledger_path);
            Ledger ledger;
            if (std::filesystem::exists(ledger_path))
                ledger = load_ledger(ledger_path, catalog);
            else
                ledger.project = std::filesystem::path(ledger_path).stem().string();

            std::vector<std::string> notes;
            UseCaseEntry entry = make_entry(add_args, catalog, notes);
            do {
                entry.id = generate_entry_id();
            } while (std::any_of(ledger.entries.begin(), ledger.entries.end(),
                                 [&](const UseCaseEntry& e) { return e.id == entry.id; }));
            std::string id = entry.id;
            ledger = add_entry(std::move(ledger), std::move(entry), catalog);
            save_ledger(ledger, ledger_path);
            for (const std::string& n : notes)
                err << "note: " << n << '\n';
            out << id << '\n';
        }
        else if (*remove_cmd) {
            LedgerLock lock(ledger_path);
            Ledger ledger = load_ledger(ledger_path, catalog);
            ledger = remove_entry(std::move(ledger), remove_id);
            save_ledger(ledger, ledger_path);
        }
        else if (*report_cmd) {
            Ledger ledger = load_ledger(ledger_path, catalog);
            Report report = build_report(ledger, catalog, config, current_time());
            if (report_format == "machine")
                out << render(report, RenderFormat::machine);
            else if (report_format == "ethics")
                out << ethical_statement(report);
            else
                out << render(report, RenderFormat::text);
        }
        else if (*estimate_cmd) {
            std::vector<std::string> notes;
            UseCaseEntry entry = make_entry(estimate_args, catalog, notes);
            ValidatedUseCase use_case = validate_entry(entry, catalog);
            Estimate e = estimate_use_case(use_case, config);
            e.assumptions.insert(e.assumptions.begin(), notes.begin(), notes.end());
            if (estimate_format == "machine")
                out << codec::to_json(e).dump(2) << '\n';
            else
                print_estimate_text(out, e, use_case.task(), use_case.kind().method == EstimationMethod::hardware);
        }
        return exit_ok;
    }
    catch (const Error& e) {
        std::string msg = single_line(e.what());
        if (!e.field().empty() && msg.find(e.field()) == std::string::npos)
            msg += " (field " + e.field() + ")";
        err << "error: " << msg << '\n';
        return e.is_io() ? exit_io : exit_validation;
    }
    catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << single_line(e.what()) << '\n';
        return exit_io;
    }
}

} // namespace co2st
