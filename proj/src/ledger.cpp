#include "co2st/ledger.hpp"

#include "co2st/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace co2st {

namespace {

using jsonutil::json;
using jsonutil::ObjectReader;

json entry_to_json(const UseCaseEntry& e)
{
    json params = json::object();
    for (const auto& [k, v] : e.params)
        params[k] = jsonutil::number(v);
    return json{
        {"id", e.id},
        {"phase", to_string(e.phase)},
        {"kind", e.kind},
        {"task", to_string(e.task)},
        {"params", std::move(params)},
        {"note", e.note},
        {"created_at", format_timestamp(e.created_at)},
    };
}

UseCaseEntry entry_from_json(const json& value, const std::string& path)
{
    ObjectReader r(value, path);
    UseCaseEntry e;
    e.id = r.require_string("id");
    if (e.id.empty())
        jsonutil::schema_error(jsonutil::join_path(path, "id"), "id must not be empty");
    e.phase = phase_from_string(r.require_string("phase"), jsonutil::join_path(path, "phase"));
    e.kind = r.require_string("kind");
    e.task = task_from_string(r.require_string("task"), jsonutil::join_path(path, "task"));

    std::string params_path = jsonutil::join_path(path, "params");
    const json& params = r.require("params");
    if (!params.is_object())
        jsonutil::schema_error(params_path, "expected an object of numbers");
    for (auto it = params.begin(); it != params.end(); ++it)
        e.params[it.key()] = ObjectReader::as_number(it.value(), jsonutil::join_path(params_path, it.key()));

    if (const json* note = r.optional("note"))
        e.note = ObjectReader::as_string(*note, jsonutil::join_path(path, "note"));
    e.created_at = parse_timestamp(r.require_string("created_at"), jsonutil::join_path(path, "created_at"));
    r.finish();
    return e;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, path, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::io, path, "error reading " + path);
    return buf.str();
}

} // namespace

std::string generate_entry_id()
{
    thread_local std::mt19937_64 engine{std::random_device{}()};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(engine() & 0xffffffffffffULL));
    return buf;
}

Timestamp now_utc()
{
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t)
{
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02uZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<unsigned>(hms.hours().count() % 24), static_cast<unsigned>(hms.minutes().count() % 60),
                  static_cast<unsigned>(hms.seconds().count() % 60));
    return buf;
}

Timestamp parse_timestamp(std::string_view text, const std::string& field)
{
    using namespace std::chrono;
    auto fail = [&]() -> Timestamp {
        throw Error(ErrorCode::schema, field,
                    field + ": expected an RFC 3339 UTC timestamp like 2025-01-31T12:00:00Z, got \"" +
                        std::string(text) + "\"");
    };
    if (text.size() != 20)
        return fail();
    std::string s(text);
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2uT%2u:%2u:%2uZ%n", &y, &mo, &d, &h, &mi, &sec, &consumed) != 6 ||
        consumed != 20)
        return fail();
    for (std::size_t i : {4u, 7u}) {
        if (s[i] != '-')
            return fail();
    }
    year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59)
        return fail();
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

ValidatedUseCase validate_entry(const UseCaseEntry& entry, const Catalog& catalog)
{
    const UseKind& kind = catalog.kind(entry.kind);
    if (kind.phase != entry.phase)
        throw Error(ErrorCode::phase_mismatch, "phase",
                    "kind \"" + kind.id + "\" belongs to phase " + std::string(to_string(kind.phase)) + ", not " +
                        std::string(to_string(entry.phase)));
    return catalog.validate_parameters(kind, entry.task, entry.params);
}

Ledger add_entry(Ledger ledger, UseCaseEntry entry, const Catalog& catalog)
{
    for (const UseCaseEntry& e : ledger.entries) {
        if (e.id == entry.id)
            throw Error(ErrorCode::duplicate_id, "id", "entry id \"" + entry.id + "\" already exists");
    }
    validate_entry(entry, catalog);
    ledger.entries.push_back(std::move(entry));
    return ledger;
}

Ledger remove_entry(Ledger ledger, std::string_view id)
{
    auto it = std::find_if(ledger.entries.begin(), ledger.entries.end(),
                           [&](const UseCaseEntry& e) { return e.id == id; });
    if (it == ledger.entries.end())
        throw Error(ErrorCode::unknown_id, "id", "no entry with id \"" + std::string(id) + "\"");
    ledger.entries.erase(it);
    return ledger;
}

LedgerTotal total(const Ledger& ledger, const Catalog& catalog, const EstimationConfig& config)
{
    LedgerTotal out;
    std::set<std::string, std::less<>> seen;
    for (const UseCaseEntry& entry : ledger.entries) {
        EntryEstimate item;
        try {
            ValidatedUseCase use_case = validate_entry(entry, catalog);
            UnitBreakdown units = aggregate_units(use_case, config);
            item.base_count = units.base_count;
            item.resolution_factor = units.resolution_factor;
            item.interaction_factor = units.interaction_factor;
            item.estimate = estimate_use_case(use_case, config);
        }
        catch (const Error& e) {
            throw Error(e.code(), e.field(), "entry " + entry.id + ": " + e.what());
        }
        item.entry_id = entry.id;
        item.phase = entry.phase;
        item.kind = entry.kind;
        item.task = entry.task;

        out.total.unit_count += item.estimate.unit_count;
        out.total.energy += item.estimate.energy;
        out.total.carbon += item.estimate.carbon;
        for (const std::string& a : item.estimate.assumptions) {
            if (seen.insert(a).second)
                out.total.assumptions.push_back(a);
        }
        out.breakdown.push_back(std::move(item));
    }
    out.total.equivalencies = equivalencies(out.total.carbon, config);
    return out;
}

std::string serialize_ledger(const Ledger& ledger)
{
    json entries = json::array();
    for (const UseCaseEntry& e : ledger.entries)
        entries.push_back(entry_to_json(e));
    json doc{
        {"format_version", ledger.format_version},
        {"project", ledger.project},
        {"entries", std::move(entries)},
    };
    return doc.dump(2) + "\n";
}

Ledger parse_ledger(std::string_view text, const Catalog& catalog)
{
    json doc = jsonutil::parse_document(text);
    ObjectReader top(doc, "");
    Ledger ledger;
    long long version = top.require_integer("format_version");
    if (version != ledger_format_version)
        throw Error(ErrorCode::unsupported_version, "format_version",
                    "unsupported ledger format_version " + std::to_string(version));
    ledger.format_version = static_cast<int>(version);
    ledger.project = top.require_string("project");

    const json& entries = top.require_array("entries");
    top.finish();

    std::set<std::string, std::less<>> ids;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        std::string path = jsonutil::index_path("entries", i);
        UseCaseEntry entry = entry_from_json(entries[i], path);
        if (!ids.insert(entry.id).second)
            throw Error(ErrorCode::duplicate_id, jsonutil::join_path(path, "id"),
                        path + ".id: duplicate entry id \"" + entry.id + "\"");
        try {
            validate_entry(entry, catalog);
        }
        catch (const Error& e) {
            const std::string& f = e.field();
            std::string field = (f == "task" || f == "phase" || f == "kind") ? jsonutil::join_path(path, f)
                                                                              : path + ".params." + f;
            throw Error(e.code(), field, field + ": " + e.what());
        }
        ledger.entries.push_back(std::move(entry));
    }
    return ledger;
}

void save_ledger(const Ledger& ledger, const std::string& path)
{
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::io, path, "cannot write " + tmp);
        out << serialize_ledger(ledger);
        out.flush();
        if (!out)
            throw Error(ErrorCode::io, path, "error writing " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorCode::io, path, "cannot replace " + path + ": " + ec.message());
}

Ledger load_ledger(const std::string& path, const Catalog& catalog)
{
    return parse_ledger(read_file(path), catalog);
}

} // namespace co2st
