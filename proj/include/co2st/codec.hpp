#pragma once

// JSON encodings of engine and report values, shared by the machine report
// format, the CLI and the HTTP service.

#include "co2st/catalog.hpp"
#include "co2st/engine.hpp"
#include "co2st/ledger.hpp"
#include "co2st/report.hpp"

#include <json.hpp>

#include <string>

namespace co2st::codec {

using json = nlohmann::ordered_json;

json to_json(const Estimate& e);
Estimate estimate_from_json(const json& value, const std::string& path);

json to_json(const EntryEstimate& e);
json to_json(const MitigationHint& h);
json to_json(const Report& r);
Report report_from_json(const json& value);

json to_json(const TaskInfo& t);
json to_json(const UseKind& k);

} // namespace co2st::codec
