#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace co2st {

enum class ErrorCode {
    unknown_phase,
    unknown_kind,
    unknown_task,
    unknown_field,
    missing_required_field,
    task_not_allowed,
    out_of_range,
    phase_mismatch,
    duplicate_id,
    unknown_id,
    no_task_for_output,
    invalid_catalog,
    invalid_config,
    unsupported_version,
    schema,
    io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library. `field` names the offending input
// (a parameter id, a JSON path such as "entries[2].phase", or empty).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string field, const std::string& message)
        : std::runtime_error(message), code_(code), field_(std::move(field)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

    bool is_io() const noexcept { return code_ == ErrorCode::io; }

private:
    ErrorCode code_;
    std::string field_;
};

} // namespace co2st
