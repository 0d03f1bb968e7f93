#include "co2st/catalog.hpp"

#include "co2st/error.hpp"
#include "co2st/numfmt.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace co2st {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s)
{
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s)
            return static_cast<Enum>(i);
    }
    return std::nullopt;
}

constexpr std::array<std::string_view, task_type_count> task_names = {
    "text-to-text",  "text-to-image",  "audio-to-text", "text-to-video",  "text-to-3d",
    "text-to-audio", "image-to-text",  "image-to-image", "image-to-3d",   "video-to-text",
    "video-to-video", "audio-to-audio", "image-to-video",
};

constexpr std::array<std::string_view, research_phase_count> phase_names = {
    "research-planning",  "prototyping-building",        "evaluation-user-studies", "data-collection",
    "analysis-synthesis", "dissemination-communication", "training-fine-tuning",
};

constexpr std::array<std::string_view, research_phase_count> phase_display_names = {
    "Research planning",  "Prototyping & building",          "Evaluation & user studies", "Data collection",
    "Analysis & synthesis", "Dissemination & communication", "Training & fine-tuning",
};

constexpr std::array<std::string_view, 8> unit_names = {
    "prompt", "image", "minute-of-audio", "video-clip", "3d-asset", "audio-clip", "caption", "frame-interpolation-run",
};

constexpr std::array<std::string_view, 5> modality_names = {"text", "image", "audio", "video", "3d"};

constexpr std::array<std::string_view, 8> value_kind_names = {
    "count", "word-count", "pixel-dimensions", "minutes", "seconds", "gpu-hours", "watts", "ratio",
};

constexpr std::array<std::string_view, 8> role_names = {
    "count", "volume", "resolution", "test-runs", "interactions", "gpu-hours", "device-power", "pue",
};

constexpr std::array<TaskType, task_type_count> task_order = {
    TaskType::text_to_text,   TaskType::text_to_image,  TaskType::audio_to_text,  TaskType::text_to_video,
    TaskType::text_to_3d,     TaskType::text_to_audio,  TaskType::image_to_text,  TaskType::image_to_image,
    TaskType::image_to_3d,    TaskType::video_to_text,  TaskType::video_to_video, TaskType::audio_to_audio,
    TaskType::image_to_video,
};

constexpr std::array<ResearchPhase, research_phase_count> phase_order = {
    ResearchPhase::research_planning,  ResearchPhase::prototyping_building,
    ResearchPhase::evaluation_user_studies, ResearchPhase::data_collection,
    ResearchPhase::analysis_synthesis, ResearchPhase::dissemination_communication,
    ResearchPhase::training_fine_tuning,
};

double parse_decimal(std::string_view literal)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(literal.data(), literal.data() + literal.size(), value);
    if (ec != std::errc{} || ptr != literal.data() + literal.size())
        throw Error(ErrorCode::invalid_catalog, "", "bad energy literal: " + std::string(literal));
    return value;
}

struct TaskRow {
    TaskType id;
    std::string_view energy_wh;
    CanonicalUnit unit;
    std::string_view proxy;
    Modality input;
    Modality output;
};

// Measured energy per interaction (Wh) for the proxy model of each task type.
constexpr std::array<TaskRow, task_type_count> task_rows = {{
    {TaskType::text_to_text, "0.004685", CanonicalUnit::prompt, "Llama-3.1-Instruct", Modality::text, Modality::text},
    {TaskType::text_to_image, "0.001301", CanonicalUnit::image, "Stable-diffusion-XL", Modality::text, Modality::image},
    {TaskType::audio_to_text, "0.006335", CanonicalUnit::minute_of_audio, "Whisper", Modality::audio, Modality::text},
    {TaskType::text_to_video, "0.021742", CanonicalUnit::video_clip, "AnimateDiff", Modality::text, Modality::video},
    {TaskType::text_to_3d, "0.026320", CanonicalUnit::asset_3d, "Shap-E", Modality::text, Modality::model_3d},
    {TaskType::text_to_audio, "0.011418", CanonicalUnit::audio_clip, "MusicGen", Modality::text, Modality::audio},
    {TaskType::image_to_text, "0.003423", CanonicalUnit::prompt, "BLIP", Modality::image, Modality::text},
    {TaskType::image_to_image, "0.000885", CanonicalUnit::image, "Instruct-Pix2Pix", Modality::image, Modality::image},
    {TaskType::image_to_3d, "0.013010", CanonicalUnit::asset_3d, "One-2-3-45", Modality::image, Modality::model_3d},
    {TaskType::video_to_text, "0.001040", CanonicalUnit::prompt, "XCLIP", Modality::video, Modality::text},
    {TaskType::video_to_video, "0.026020", CanonicalUnit::video_clip, "RIFE", Modality::video, Modality::video},
    {TaskType::audio_to_audio, "0.006335", CanonicalUnit::minute_of_audio, "FreeVC", Modality::audio, Modality::audio},
    {TaskType::image_to_video, "0.026020", CanonicalUnit::video_clip, "SadTalker", Modality::image, Modality::video},
}};

const std::array<TaskInfo, task_type_count>& task_table()
{
    static const std::array<TaskInfo, task_type_count> table = [] {
        std::array<TaskInfo, task_type_count> out{};
        for (std::size_t i = 0; i < task_type_count; ++i) {
            const TaskRow& row = task_rows[i];
            out[i] = TaskInfo{row.id,   row.energy_wh, WattHours(parse_decimal(row.energy_wh)),
                              row.unit, row.proxy,     row.input,
                              row.output};
        }
        return out;
    }();
    return table;
}

[[noreturn]] void invalid(const std::string& where, const std::string& what)
{
    throw Error(ErrorCode::invalid_catalog, where, "catalog: " + where + ": " + what);
}

std::string allowed_list(const UseKind& kind)
{
    std::string out;
    for (TaskType t : kind.allowed_tasks) {
        if (!out.empty())
            out += ", ";
        out += to_string(t);
    }
    return out;
}

void check_kind(const UseKind& kind, const std::map<CanonicalUnit, double>& baselines)
{
    const std::string& where = kind.id;
    if (kind.id.empty())
        invalid("kinds", "kind with empty id");
    if (kind.allowed_tasks.empty())
        invalid(where, "allowed_tasks is empty");
    std::set<TaskType> task_set(kind.allowed_tasks.begin(), kind.allowed_tasks.end());
    if (task_set.size() != kind.allowed_tasks.size())
        invalid(where, "allowed_tasks has duplicates");

    std::set<std::string> ids;
    std::map<FieldRole, int> role_counts;
    for (const FieldSpec& f : kind.parameter_schema) {
        if (f.id.empty() || !ids.insert(f.id).second)
            invalid(where, "empty or duplicate field id \"" + f.id + "\"");
        if (!std::isfinite(f.minimum) || f.minimum < 0.0)
            invalid(where, "field " + f.id + " has a negative minimum");
        ++role_counts[f.role];

        if (f.role == FieldRole::resolution || f.role == FieldRole::volume) {
            for (TaskType t : kind.allowed_tasks) {
                CanonicalUnit unit = task_table()[static_cast<std::size_t>(t)].canonical_unit;
                auto dim = baseline_dimension(unit);
                if (!dim || *dim != f.value_kind || !baselines.contains(unit))
                    invalid(where, "field " + f.id + " (" + std::string(to_string(f.value_kind)) +
                                       ") has no matching baseline for task " + std::string(to_string(t)));
            }
        }
    }
    for (FieldRole single : {FieldRole::volume, FieldRole::resolution, FieldRole::test_runs, FieldRole::interactions,
                             FieldRole::gpu_hours, FieldRole::device_power, FieldRole::pue}) {
        if (role_counts[single] > 1)
            invalid(where, "more than one field with role " + std::string(to_string(single)));
    }

    bool has_hardware = role_counts[FieldRole::gpu_hours] + role_counts[FieldRole::device_power] +
                        role_counts[FieldRole::pue] > 0;
    bool has_usage = role_counts[FieldRole::count] + role_counts[FieldRole::volume] +
                     role_counts[FieldRole::resolution] + role_counts[FieldRole::test_runs] +
                     role_counts[FieldRole::interactions] > 0;
    if (kind.method == EstimationMethod::hardware) {
        if (role_counts[FieldRole::gpu_hours] != 1 || has_usage)
            invalid(where, "hardware kinds take gpu-hours, device-power and pue fields only");
    }
    else {
        if (has_hardware)
            invalid(where, "proxy kinds cannot declare hardware fields");
        if (role_counts[FieldRole::count] + role_counts[FieldRole::test_runs] + role_counts[FieldRole::interactions] == 0)
            invalid(where, "proxy kinds need a count, test-runs or interactions field");
    }

    for (const auto& [field_id, value] : kind.defaults) {
        const FieldSpec* f = kind.field(field_id);
        if (!f)
            invalid(where, "default for unknown field \"" + field_id + "\"");
        if (f->required)
            invalid(where, "required field \"" + field_id + "\" has a default");
        if (!std::isfinite(value) || value < f->minimum)
            invalid(where, "default for \"" + field_id + "\" is below its minimum");
    }
}

// Field constructors for the built-in schema.
FieldSpec count_field(std::string id, std::string label, bool required = true, ValueKind kind = ValueKind::count)
{
    return {std::move(id), std::move(label), kind, FieldRole::count, required, 0.0};
}

FieldSpec words_per_prompt()
{
    return {"words_per_prompt", "Words per prompt (input + output)", ValueKind::word_count, FieldRole::resolution, false, 0.0};
}

FieldSpec image_pixels()
{
    return {"image_pixels", "Pixels per image (width x height)", ValueKind::pixel_dimensions, FieldRole::resolution, false, 0.0};
}

FieldSpec test_runs()
{
    return {"test_runs", "Number of test runs during prototyping", ValueKind::count, FieldRole::test_runs, false, 0.0};
}

FieldSpec interactions(bool required)
{
    return {"interactions", "Number of interactions during evaluation", ValueKind::count, FieldRole::interactions,
            required, 0.0};
}

FieldSpec units_per_call()
{
    return count_field("units_per_call", "Units per call (prompts, images, minutes, clips)", false);
}

std::vector<FieldSpec> hardware_fields()
{
    return {
        {"gpu_hours", "GPU hours", ValueKind::gpu_hours, FieldRole::gpu_hours, true, 0.0},
        {"device_power_watts", "Device power draw (W)", ValueKind::watts, FieldRole::device_power, false, 1.0},
        {"pue", "Power usage effectiveness", ValueKind::ratio, FieldRole::pue, false, 1.0},
    };
}

std::vector<TaskType> every_task()
{
    return {task_order.begin(), task_order.end()};
}

std::vector<TaskType> generative_tasks()
{
    return {TaskType::text_to_text,   TaskType::text_to_image, TaskType::text_to_video, TaskType::text_to_3d,
            TaskType::text_to_audio,  TaskType::image_to_image, TaskType::image_to_3d,  TaskType::image_to_video};
}

UseKind prompt_kind(std::string id, std::string name, ResearchPhase phase,
                    std::vector<TaskType> tasks = {TaskType::text_to_text})
{
    return {std::move(id), std::move(name), phase, std::move(tasks),
            {count_field("prompts", "Number of prompts"), words_per_prompt()}, {}, EstimationMethod::proxy_interaction};
}

UseKind output_kind(std::string id, std::string name, ResearchPhase phase, std::vector<TaskType> tasks)
{
    return {std::move(id), std::move(name), phase, std::move(tasks),
            {count_field("outputs", "Number of generated outputs")}, {}, EstimationMethod::proxy_interaction};
}

UseKind image_kind(std::string id, std::string name, ResearchPhase phase)
{
    return {std::move(id), std::move(name), phase, {TaskType::text_to_image, TaskType::image_to_image},
            {count_field("images", "Number of images generated"), image_pixels()}, {},
            EstimationMethod::proxy_interaction};
}

UseKind hardware_kind(std::string id, std::string name)
{
    return {std::move(id), std::move(name), ResearchPhase::training_fine_tuning, every_task(), hardware_fields(), {},
            EstimationMethod::hardware};
}

std::vector<UseKind> builtin_kinds()
{
    using P = ResearchPhase;
    std::vector<UseKind> k;

    k.push_back(prompt_kind("research-gap-identification", "Identifying research gaps", P::research_planning));
    k.push_back(output_kind("study-material-generation", "Generating study materials", P::research_planning,
                            {TaskType::text_to_text, TaskType::text_to_image, TaskType::text_to_audio,
                             TaskType::text_to_video}));
    k.push_back({"literature-review",
                 "Literature review/search",
                 P::research_planning,
                 {TaskType::text_to_text},
                 {count_field("article_count", "Number of articles/documents processed"),
                  {"words_per_article", "Words per article", ValueKind::word_count, FieldRole::volume, false, 0.0}},
                 {{"words_per_article", 6000.0}},
                 EstimationMethod::proxy_interaction});
    k.push_back(prompt_kind("study-design", "Study design", P::research_planning));
    k.push_back(output_kind("workshop-course-material", "Workshops and courses", P::research_planning,
                            {TaskType::text_to_text, TaskType::text_to_image}));

    k.push_back({"genai-prototype-integration",
                 "Prototyping using GenAI functionality",
                 P::prototyping_building,
                 every_task(),
                 {units_per_call(), test_runs(), interactions(false)},
                 {{"units_per_call", 1.0}, {"test_runs", 0.0}, {"interactions", 0.0}},
                 EstimationMethod::proxy_interaction});
    k.push_back({"customized-chatbot",
                 "Customized chatbot",
                 P::prototyping_building,
                 {TaskType::text_to_text},
                 {units_per_call(), test_runs(), interactions(false), words_per_prompt()},
                 {{"units_per_call", 1.0}, {"test_runs", 0.0}, {"interactions", 0.0}},
                 EstimationMethod::proxy_interaction});
    k.push_back(prompt_kind("code-generation", "Generating code for systems", P::prototyping_building));
    k.push_back(output_kind("prototype-content-generation", "Generating content or visuals for a prototype",
                            P::prototyping_building, generative_tasks()));

    k.push_back({"user-evaluation",
                 "Evaluation of prototypes with users",
                 P::evaluation_user_studies,
                 every_task(),
                 {units_per_call(), test_runs(), interactions(true)},
                 {{"units_per_call", 1.0}, {"test_runs", 0.0}},
                 EstimationMethod::proxy_interaction});
    k.push_back({"user-study",
                 "User study with off-the-shelf GenAI products",
                 P::evaluation_user_studies,
                 every_task(),
                 {units_per_call(), interactions(true)},
                 {{"units_per_call", 1.0}},
                 EstimationMethod::proxy_interaction});

    k.push_back(output_kind("dataset-generation", "Generating data for exploration of the output", P::data_collection,
                            generative_tasks()));
    k.push_back(output_kind("evaluation-data-generation", "Generating data for evaluation of the output",
                            P::data_collection, generative_tasks()));
    k.push_back(image_kind("image-dataset-generation", "Generating image datasets", P::data_collection));
    k.push_back({"transcription",
                 "Transcription of audio data",
                 P::data_collection,
                 {TaskType::audio_to_text},
                 {count_field("minutes", "Minutes of audio transcribed", true, ValueKind::minutes)},
                 {},
                 EstimationMethod::proxy_interaction});
    k.push_back(prompt_kind("simulated-human-data", "Simulating human-generated data", P::data_collection));

    k.push_back(prompt_kind("qualitative-analysis", "Qualitative analysis", P::analysis_synthesis));
    k.push_back(prompt_kind("quantitative-analysis", "Quantitative analysis", P::analysis_synthesis));
    k.push_back(prompt_kind("data-trend-identification", "Data trend identification", P::analysis_synthesis,
                            {TaskType::text_to_text, TaskType::image_to_text, TaskType::video_to_text}));

    k.push_back(prompt_kind("manuscript-text", "Generation of manuscript text", P::dissemination_communication));
    k.push_back(prompt_kind("text-improvement", "Suggestions for text improvement", P::dissemination_communication));
    k.push_back(image_kind("figure-generation", "Graphics for articles and presentations",
                           P::dissemination_communication));

    k.push_back(hardware_kind("model-training", "Training novel GenAI models"));
    k.push_back(hardware_kind("fine-tuning", "Fine-tuning existing GenAI models"));
    return k;
}

std::map<CanonicalUnit, double> builtin_baselines()
{
    return {
        {CanonicalUnit::prompt, 500.0},
        {CanonicalUnit::image, 1024.0 * 1024.0},
        {CanonicalUnit::minute_of_audio, 1.0},
        {CanonicalUnit::video_clip, 2.0},
    };
}

UseKind parse_overlay_kind(const jsonutil::json& value, const std::string& path)
{
    using jsonutil::ObjectReader;
    ObjectReader r(value, path);
    UseKind kind;
    kind.id = r.require_string("id");
    kind.display_name = r.require_string("display_name");
    kind.phase = phase_from_string(r.require_string("phase"), jsonutil::join_path(path, "phase"));

    const auto& tasks = r.require_array("allowed_tasks");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::string p = jsonutil::index_path(jsonutil::join_path(path, "allowed_tasks"), i);
        kind.allowed_tasks.push_back(task_from_string(ObjectReader::as_string(tasks[i], p), p));
    }

    if (const auto* method = r.optional("method")) {
        std::string m = ObjectReader::as_string(*method, jsonutil::join_path(path, "method"));
        if (m == "proxy-interaction")
            kind.method = EstimationMethod::proxy_interaction;
        else if (m == "hardware")
            kind.method = EstimationMethod::hardware;
        else
            jsonutil::schema_error(jsonutil::join_path(path, "method"), "unknown method \"" + m + "\"");
    }

    const auto& fields = r.require_array("parameter_schema");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string fp = jsonutil::index_path(jsonutil::join_path(path, "parameter_schema"), i);
        ObjectReader fr(fields[i], fp);
        FieldSpec f;
        f.id = fr.require_string("id");
        f.label = fr.require_string("label");
        auto vk = parse_value_kind(fr.require_string("value_kind"));
        if (!vk)
            jsonutil::schema_error(jsonutil::join_path(fp, "value_kind"), "unknown value kind");
        f.value_kind = *vk;
        auto role = parse_field_role(fr.require_string("role"));
        if (!role)
            jsonutil::schema_error(jsonutil::join_path(fp, "role"), "unknown role");
        f.role = *role;
        f.required = ObjectReader::as_bool(fr.require("required"), jsonutil::join_path(fp, "required"));
        if (const auto* min = fr.optional("minimum"))
            f.minimum = ObjectReader::as_number(*min, jsonutil::join_path(fp, "minimum"));
        fr.finish();
        kind.parameter_schema.push_back(std::move(f));
    }

    if (const auto* defaults = r.optional("defaults")) {
        std::string dp = jsonutil::join_path(path, "defaults");
        if (!defaults->is_object())
            jsonutil::schema_error(dp, "expected an object");
        for (auto it = defaults->begin(); it != defaults->end(); ++it)
            kind.defaults[it.key()] = ObjectReader::as_number(it.value(), jsonutil::join_path(dp, it.key()));
    }
    r.finish();
    return kind;
}

} // namespace

std::string_view to_string(TaskType t) { return task_names[static_cast<std::size_t>(t)]; }
std::string_view to_string(ResearchPhase p) { return phase_names[static_cast<std::size_t>(p)]; }
std::string_view to_string(CanonicalUnit u) { return unit_names[static_cast<std::size_t>(u)]; }
std::string_view to_string(Modality m) { return modality_names[static_cast<std::size_t>(m)]; }
std::string_view to_string(ValueKind k) { return value_kind_names[static_cast<std::size_t>(k)]; }
std::string_view to_string(FieldRole r) { return role_names[static_cast<std::size_t>(r)]; }
std::string_view to_string(EstimationMethod m)
{
    return m == EstimationMethod::hardware ? "hardware" : "proxy-interaction";
}

std::optional<TaskType> parse_task_type(std::string_view s) { return lookup<TaskType>(task_names, s); }
std::optional<ResearchPhase> parse_research_phase(std::string_view s) { return lookup<ResearchPhase>(phase_names, s); }
std::optional<CanonicalUnit> parse_canonical_unit(std::string_view s) { return lookup<CanonicalUnit>(unit_names, s); }
std::optional<Modality> parse_modality(std::string_view s) { return lookup<Modality>(modality_names, s); }
std::optional<ValueKind> parse_value_kind(std::string_view s) { return lookup<ValueKind>(value_kind_names, s); }
std::optional<FieldRole> parse_field_role(std::string_view s) { return lookup<FieldRole>(role_names, s); }

TaskType task_from_string(std::string_view s, const std::string& field)
{
    if (auto t = parse_task_type(s))
        return *t;
    throw Error(ErrorCode::unknown_task, field, "unknown task type \"" + std::string(s) + "\"");
}

ResearchPhase phase_from_string(std::string_view s, const std::string& field)
{
    if (auto p = parse_research_phase(s))
        return *p;
    throw Error(ErrorCode::unknown_phase, field, "unknown research phase \"" + std::string(s) + "\"");
}

std::span<const TaskType> all_task_types() { return task_order; }
std::span<const ResearchPhase> all_research_phases() { return phase_order; }

std::string_view display_name(ResearchPhase p) { return phase_display_names[static_cast<std::size_t>(p)]; }

std::optional<ValueKind> baseline_dimension(CanonicalUnit unit)
{
    switch (unit) {
    case CanonicalUnit::prompt: return ValueKind::word_count;
    case CanonicalUnit::image: return ValueKind::pixel_dimensions;
    case CanonicalUnit::minute_of_audio: return ValueKind::minutes;
    case CanonicalUnit::video_clip: return ValueKind::seconds;
    default: return std::nullopt;
    }
}

bool UseKind::allows(TaskType t) const
{
    return std::find(allowed_tasks.begin(), allowed_tasks.end(), t) != allowed_tasks.end();
}

const FieldSpec* UseKind::field(std::string_view field_id) const
{
    for (const FieldSpec& f : parameter_schema) {
        if (f.id == field_id)
            return &f;
    }
    return nullptr;
}

const FieldSpec* UseKind::field_with_role(FieldRole role) const
{
    for (const FieldSpec& f : parameter_schema) {
        if (f.role == role)
            return &f;
    }
    return nullptr;
}

std::optional<double> ValidatedUseCase::get(std::string_view field_id) const
{
    auto it = values_.find(field_id);
    if (it == values_.end())
        return std::nullopt;
    return it->second;
}

Catalog::Catalog(std::vector<UseKind> kinds, std::map<CanonicalUnit, double> baselines)
    : kinds_(std::move(kinds)), baselines_(std::move(baselines))
{
    for (const auto& [unit, value] : baselines_) {
        if (!baseline_dimension(unit))
            invalid("baselines", std::string(to_string(unit)) + " has no resolution dimension");
        if (!std::isfinite(value) || value <= 0.0)
            invalid("baselines", std::string(to_string(unit)) + " baseline must be positive");
    }
    std::set<std::string, std::less<>> ids;
    for (const UseKind& kind : kinds_) {
        check_kind(kind, baselines_);
        if (!ids.insert(kind.id).second)
            invalid(kind.id, "duplicate kind id");
    }
    for (ResearchPhase p : all_research_phases()) {
        if (kinds_for_phase(p).empty())
            invalid("kinds", "phase " + std::string(to_string(p)) + " has no use kinds");
    }
}

std::span<const TaskInfo> Catalog::tasks() const { return task_table(); }

const TaskInfo& Catalog::task(TaskType t) const { return task_table()[static_cast<std::size_t>(t)]; }

const UseKind* Catalog::find_kind(std::string_view id) const
{
    for (const UseKind& k : kinds_) {
        if (k.id == id)
            return &k;
    }
    return nullptr;
}

const UseKind& Catalog::kind(std::string_view id) const
{
    if (const UseKind* k = find_kind(id))
        return *k;
    throw Error(ErrorCode::unknown_kind, "kind", "unknown use kind \"" + std::string(id) + "\"");
}

std::vector<const UseKind*> Catalog::kinds_for_phase(ResearchPhase phase) const
{
    std::vector<const UseKind*> out;
    for (const UseKind& k : kinds_) {
        if (k.phase == phase)
            out.push_back(&k);
    }
    return out;
}

std::optional<double> Catalog::baseline(CanonicalUnit unit) const
{
    auto it = baselines_.find(unit);
    if (it == baselines_.end())
        return std::nullopt;
    return it->second;
}

ValidatedUseCase Catalog::validate_parameters(const UseKind& kind, TaskType task, const ParamMap& params) const
{
    if (!kind.allows(task)) {
        std::string msg = "task \"" + std::string(to_string(task)) + "\" is not allowed for kind \"" + kind.id + "\"";
        msg += kind.locked() ? "; kind is locked to " : "; allowed: ";
        msg += allowed_list(kind);
        throw Error(ErrorCode::task_not_allowed, "task", msg);
    }

    for (const auto& [key, value] : params) {
        const FieldSpec* f = kind.field(key);
        if (!f)
            throw Error(ErrorCode::unknown_field, key,
                        "unknown parameter \"" + key + "\" for kind \"" + kind.id + "\"");
        if (!std::isfinite(value) || value < f->minimum)
            throw Error(ErrorCode::out_of_range, key,
                        "parameter \"" + key + "\" = " + format_shortest(value) + " is below its minimum " +
                            format_shortest(f->minimum));
    }

    ParamMap values = params;
    std::vector<std::string> defaulted;
    for (const FieldSpec& f : kind.parameter_schema) {
        if (values.contains(f.id))
            continue;
        if (f.required)
            throw Error(ErrorCode::missing_required_field, f.id,
                        "missing required parameter \"" + f.id + "\" (" + f.label + ")");
        if (auto d = kind.defaults.find(f.id); d != kind.defaults.end()) {
            values.emplace(f.id, d->second);
            defaulted.push_back(f.id);
        }
    }

    const TaskInfo& info = this->task(task);
    return ValidatedUseCase(kind, info, baseline(info.canonical_unit), std::move(values), std::move(defaulted));
}

Catalog Catalog::with_overlay(std::string_view overlay_text) const
{
    using jsonutil::ObjectReader;
    auto doc = jsonutil::parse_document(overlay_text);
    ObjectReader top(doc, "");
    long long version = top.require_integer("format_version");
    if (version != 1)
        throw Error(ErrorCode::unsupported_version, "format_version",
                    "unsupported catalog overlay format_version " + std::to_string(version));
    ObjectReader section = top.require_object("catalog");
    top.finish();

    if (section.has("tasks") || section.has("energy") || section.has("energy_per_unit"))
        throw Error(ErrorCode::invalid_catalog, "catalog.tasks",
                    "catalog overlay may not override per-interaction energy constants");

    std::vector<UseKind> kinds = kinds_;
    std::map<CanonicalUnit, double> baselines = baselines_;

    if (const auto* b = section.optional("baselines")) {
        std::string bp = "catalog.baselines";
        if (!b->is_object())
            jsonutil::schema_error(bp, "expected an object");
        for (auto it = b->begin(); it != b->end(); ++it) {
            auto unit = parse_canonical_unit(it.key());
            if (!unit)
                jsonutil::schema_error(jsonutil::join_path(bp, it.key()), "unknown canonical unit");
            baselines[*unit] = ObjectReader::as_number(it.value(), jsonutil::join_path(bp, it.key()));
        }
    }

    if (const auto* k = section.optional("kinds")) {
        if (!k->is_array())
            jsonutil::schema_error("catalog.kinds", "expected an array");
        for (std::size_t i = 0; i < k->size(); ++i) {
            UseKind kind = parse_overlay_kind((*k)[i], jsonutil::index_path("catalog.kinds", i));
            if (find_kind(kind.id))
                throw Error(ErrorCode::invalid_catalog, jsonutil::index_path("catalog.kinds", i),
                            "catalog overlay may not redefine built-in kind \"" + kind.id + "\"");
            kinds.push_back(std::move(kind));
        }
    }
    section.finish();
    return Catalog(std::move(kinds), std::move(baselines));
}

const Catalog& builtin_catalog()
{
    static const Catalog catalog(builtin_kinds(), builtin_baselines());
    return catalog;
}

Catalog load_catalog_overlay(const Catalog& base, const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, path, "cannot read catalog overlay " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return base.with_overlay(buf.str());
}

} // namespace co2st
