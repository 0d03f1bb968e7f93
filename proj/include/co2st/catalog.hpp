#pragma once

#include "co2st/quantity.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace co2st {

// Rows of the per-interaction energy table, in table order.
enum class TaskType : std::uint8_t {
    text_to_text,
    text_to_image,
    audio_to_text,
    text_to_video,
    text_to_3d,
    text_to_audio,
    image_to_text,
    image_to_image,
    image_to_3d,
    video_to_text,
    video_to_video,
    audio_to_audio,
    image_to_video,
};
inline constexpr std::size_t task_type_count = 13;

enum class ResearchPhase : std::uint8_t {
    research_planning,
    prototyping_building,
    evaluation_user_studies,
    data_collection,
    analysis_synthesis,
    dissemination_communication,
    training_fine_tuning,
};
inline constexpr std::size_t research_phase_count = 7;

enum class CanonicalUnit : std::uint8_t {
    prompt,
    image,
    minute_of_audio,
    video_clip,
    asset_3d,
    audio_clip,
    caption,
    frame_interpolation_run,
};

enum class Modality : std::uint8_t { text, image, audio, video, model_3d };

enum class ValueKind : std::uint8_t { count, word_count, pixel_dimensions, minutes, seconds, gpu_hours, watts, ratio };

// How a parameter enters the unit-count aggregation.
enum class FieldRole : std::uint8_t {
    count,        // multiplies the base count
    volume,       // document size, converted to units through the baseline resolution
    resolution,   // per-unit size; contributes value / baseline
    test_runs,    // calls made while prototyping
    interactions, // calls made by participants
    gpu_hours,
    device_power,
    pue,
};

enum class EstimationMethod : std::uint8_t {
    proxy_interaction, // N * E_p with a measured proxy model
    hardware,          // device hours * power * PUE
};

std::string_view to_string(TaskType t);
std::string_view to_string(ResearchPhase p);
std::string_view to_string(CanonicalUnit u);
std::string_view to_string(Modality m);
std::string_view to_string(ValueKind k);
std::string_view to_string(FieldRole r);
std::string_view to_string(EstimationMethod m);

std::optional<TaskType> parse_task_type(std::string_view s);
std::optional<ResearchPhase> parse_research_phase(std::string_view s);
std::optional<CanonicalUnit> parse_canonical_unit(std::string_view s);
std::optional<Modality> parse_modality(std::string_view s);
std::optional<ValueKind> parse_value_kind(std::string_view s);
std::optional<FieldRole> parse_field_role(std::string_view s);

// Throwing lookups used when parsing external input.
TaskType task_from_string(std::string_view s, const std::string& field = "task");
ResearchPhase phase_from_string(std::string_view s, const std::string& field = "phase");

std::span<const TaskType> all_task_types();
std::span<const ResearchPhase> all_research_phases();

std::string_view display_name(ResearchPhase p);

/// The dimension in which a baseline resolution for `unit` is expressed, if the
/// unit has one (words for prompts, pixels for images, seconds for clips, ...).
std::optional<ValueKind> baseline_dimension(CanonicalUnit unit);

struct TaskInfo {
    TaskType id;
    std::string_view energy_literal; // exact decimal as published, Wh
    WattHours energy_per_unit;       // energy_literal parsed once
    CanonicalUnit canonical_unit;
    std::string_view proxy_model;
    Modality input;
    Modality output;
};

struct FieldSpec {
    std::string id;
    std::string label;
    ValueKind value_kind = ValueKind::count;
    FieldRole role = FieldRole::count;
    bool required = false;
    double minimum = 0.0;

    bool operator==(const FieldSpec&) const = default;
};

struct UseKind {
    std::string id;
    std::string display_name;
    ResearchPhase phase = ResearchPhase::research_planning;
    std::vector<TaskType> allowed_tasks;
    std::vector<FieldSpec> parameter_schema;
    std::map<std::string, double> defaults;
    EstimationMethod method = EstimationMethod::proxy_interaction;

    bool locked() const { return allowed_tasks.size() == 1; }
    bool allows(TaskType t) const;
    const FieldSpec* field(std::string_view id) const;
    const FieldSpec* field_with_role(FieldRole role) const;

    bool operator==(const UseKind&) const = default;
};

using ParamMap = std::map<std::string, double, std::less<>>;

// A use case whose parameters passed validation. Holds a pointer into the
// catalog that produced it; the catalog must outlive it.
class ValidatedUseCase {
public:
    ValidatedUseCase(const UseKind& kind, const TaskInfo& task, std::optional<double> baseline, ParamMap values,
                     std::vector<std::string> defaulted)
        : kind_(&kind), task_(&task), baseline_(baseline), values_(std::move(values)), defaulted_(std::move(defaulted))
    {}

    const UseKind& kind() const { return *kind_; }
    const TaskInfo& task() const { return *task_; }
    /// Catalog baseline resolution for the task's canonical unit.
    std::optional<double> baseline() const { return baseline_; }
    const ParamMap& values() const { return values_; }
    /// Field ids whose value came from the kind's defaults.
    const std::vector<std::string>& defaulted() const { return defaulted_; }

    std::optional<double> get(std::string_view field_id) const;

private:
    const UseKind* kind_;
    const TaskInfo* task_;
    std::optional<double> baseline_;
    ParamMap values_;
    std::vector<std::string> defaulted_;
};

class Catalog {
public:
    /// Checks every structural invariant; throws Error(invalid_catalog) on violation.
    Catalog(std::vector<UseKind> kinds, std::map<CanonicalUnit, double> baselines);

    std::span<const TaskInfo> tasks() const;
    const TaskInfo& task(TaskType t) const;
    std::span<const ResearchPhase> phases() const { return all_research_phases(); }
    std::span<const UseKind> kinds() const { return kinds_; }
    const UseKind& kind(std::string_view id) const;
    const UseKind* find_kind(std::string_view id) const;
    std::vector<const UseKind*> kinds_for_phase(ResearchPhase phase) const;

    std::optional<double> baseline(CanonicalUnit unit) const;
    std::optional<double> baseline_resolution(TaskType t) const { return baseline(task(t).canonical_unit); }
    const std::map<CanonicalUnit, double>& baselines() const { return baselines_; }

    ValidatedUseCase validate_parameters(const UseKind& kind, TaskType task, const ParamMap& params) const;

    /// Returns a new catalog extended by an overlay document (JSON text with a
    /// top-level "catalog" section). Overlays may add kinds and override
    /// baselines; they may not touch task energy constants.
    Catalog with_overlay(std::string_view overlay_text) const;

private:
    std::vector<UseKind> kinds_;
    std::map<CanonicalUnit, double> baselines_;
};

const Catalog& builtin_catalog();

Catalog load_catalog_overlay(const Catalog& base, const std::string& path);

inline ValidatedUseCase validate_parameters(const Catalog& catalog, const UseKind& kind, TaskType task,
                                            const ParamMap& params)
{
    return catalog.validate_parameters(kind, task, params);
}

} // namespace co2st
