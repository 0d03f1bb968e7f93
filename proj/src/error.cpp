#include "co2st/error.hpp"

namespace co2st {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::unknown_phase: return "unknown-phase";
    case ErrorCode::unknown_kind: return "unknown-kind";
    case ErrorCode::unknown_task: return "unknown-task";
    case ErrorCode::unknown_field: return "unknown-field";
    case ErrorCode::missing_required_field: return "missing-required-field";
    case ErrorCode::task_not_allowed: return "task-not-allowed";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::phase_mismatch: return "phase-mismatch";
    case ErrorCode::duplicate_id: return "duplicate-id";
    case ErrorCode::unknown_id: return "unknown-id";
    case ErrorCode::no_task_for_output: return "no-task-for-output";
    case ErrorCode::invalid_catalog: return "invalid-catalog";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::unsupported_version: return "unsupported-version";
    case ErrorCode::schema: return "schema";
    case ErrorCode::io: return "io";
    }
    return "unknown";
}

} // namespace co2st
