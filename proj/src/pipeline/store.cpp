#include "egoscript/pipeline/store.h"

#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "egoscript/core/error.h"
#include "egoscript/domain/codec.h"
#include "egoscript/pipeline/config.h"

namespace egoscript {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 5> kStepFiles{
    "step1_interventions.json", "step2_user_actions.json", "step3_signals_all.json",
    "step4_mode_binding.json",  "script.yaml",
};

void check_step(int step) {
    if (step < 1 || step > ArtifactStore::kSteps) {
        throw InputError(fmt::format("step must be in 1..5, got {}", step));
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

template <class T>
std::vector<T> load_list(const std::string& text, const char* key, const fs::path& source) {
    auto j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains(key)) {
        throw ValidationError(source.string() + " is not a valid artifact file",
                              {{violation_code::kMalformedPayload, key, "missing list " + std::string(key)}});
    }
    auto items = decode_list<T>(j[key], key);
    if (!items) throw ValidationError(source.string() + " failed to decode", items.violations());
    return std::move(items).value();
}

}  // namespace

Violations validate_pipeline_config(const PipelineConfig& cfg) {
    Violations out;
    auto positive = [&](int v, const char* name) {
        if (v < 1) out.push_back({violation_code::kOutOfRange, name, std::string(name) + " must be >= 1"});
    };
    positive(cfg.k_interventions, "k_interventions");
    positive(cfg.m_actions, "m_actions");
    if (cfg.schema_retry_limit < 0) {
        out.push_back({violation_code::kOutOfRange, "schema_retry_limit", "schema_retry_limit must be >= 0"});
    }
    for (std::size_t i = 0; i < 4; ++i) {
        if (!(cfg.default_segment_durations_s[i] > 0.0)) {
            out.push_back({violation_code::kOutOfRange,
                           fmt::format("default_segment_durations_s[{}]", i), "durations must be > 0"});
        }
    }
    for (std::size_t i = 0; i < 5; ++i) {
        if (cfg.prompt_template_ids[i].empty()) {
            out.push_back({violation_code::kEmptyField, fmt::format("prompt_template_ids[{}]", i),
                           "template id must be non-empty"});
        }
    }
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io_error", "cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("io_error", "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::mutex& store_lock(const fs::path& root) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::unique_ptr<std::mutex>> locks;
    std::lock_guard guard(registry_mutex);
    auto key = fs::weakly_canonical(root).string();
    auto& slot = locks[key];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

// =============================================================================
// ArtifactStore
// =============================================================================

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) {}

const char* ArtifactStore::file_name(int step) {
    check_step(step);
    return kStepFiles[static_cast<std::size_t>(step - 1)];
}

fs::path ArtifactStore::step_path(int step) const { return root_ / file_name(step); }

bool ArtifactStore::has_step(int step) const { return fs::exists(step_path(step)); }

int ArtifactStore::completed_steps() const {
    int n = 0;
    while (n < kSteps && has_step(n + 1)) ++n;
    return n;
}

void ArtifactStore::write_step(int step, const std::string& content) {
    check_step(step);
    if (completed_steps() < step - 1) {
        throw OrderError(fmt::format("step {} requires steps 1..{} to be complete (have {})", step,
                                     step - 1, completed_steps()));
    }
    write_file_atomic(step_path(step), content);
}

std::string ArtifactStore::read_step(int step) const {
    if (!has_step(step)) throw NotFoundError(fmt::format("step {} artifact does not exist", step));
    return read_file(step_path(step));
}

void ArtifactStore::remove_steps_from(int step) {
    check_step(step);
    for (int s = kSteps; s >= step; --s) fs::remove(step_path(s));
}

std::string ArtifactStore::read_file(const fs::path& p) const { return read_text_file(p); }

bool ArtifactStore::has_scenario() const { return fs::exists(root_ / "scenario.json"); }

ScenarioSpec ArtifactStore::load_scenario() const {
    const auto path = root_ / "scenario.json";
    auto j = Json::parse(read_file(path), nullptr, false);
    auto s = decode<ScenarioSpec>(j);
    if (!s) throw ValidationError(path.string() + " failed to decode", s.violations());
    return std::move(s).value();
}

void ArtifactStore::save_scenario(const ScenarioSpec& scenario) {
    write_file_atomic(root_ / "scenario.json", dump(to_json(scenario)));
}

std::vector<InterventionCandidate> ArtifactStore::load_interventions() const {
    return load_list<InterventionCandidate>(read_step(1), "interventions", step_path(1));
}
std::vector<UserActionCandidate> ArtifactStore::load_user_actions() const {
    return load_list<UserActionCandidate>(read_step(2), "user_actions", step_path(2));
}
std::vector<SignalSpec> ArtifactStore::load_signals() const {
    return load_list<SignalSpec>(read_step(3), "signals", step_path(3));
}
std::vector<StructuredSeed> ArtifactStore::load_seeds() const {
    return load_list<StructuredSeed>(read_step(4), "seeds", step_path(4));
}
std::vector<ScriptContract> ArtifactStore::load_scripts() const {
    auto scripts = scripts_from_yaml(read_step(5));
    if (!scripts) throw ValidationError(step_path(5).string() + " failed to decode", scripts.violations());
    return std::move(scripts).value();
}

std::string ArtifactStore::encode_interventions(const std::string& scenario_id,
                                                std::span<const InterventionCandidate> items) {
    return dump(Json{{"scenario_id", scenario_id}, {"interventions", to_json_list(items)}});
}
std::string ArtifactStore::encode_user_actions(std::span<const UserActionCandidate> items) {
    return dump(Json{{"user_actions", to_json_list(items)}});
}
std::string ArtifactStore::encode_signals(std::span<const SignalSpec> items) {
    return dump(Json{{"signals", to_json_list(items)}});
}
std::string ArtifactStore::encode_seeds(std::span<const StructuredSeed> items) {
    return dump(Json{{"seeds", to_json_list(items)}});
}
std::string ArtifactStore::encode_scripts(std::span<const ScriptContract> items) {
    return scripts_to_yaml(items);
}

ArtifactSet ArtifactStore::artifact_set() const {
    ArtifactSet set;
    if (has_scenario()) set.scenarios.push_back(load_scenario());
    if (has_step(1)) set.interventions = load_interventions();
    if (has_step(2)) set.user_actions = load_user_actions();
    if (has_step(3)) set.signals = load_signals();
    if (has_step(4)) set.seeds = load_seeds();
    return set;
}

RetryLog ArtifactStore::load_retry_log() const {
    RetryLog log;
    const auto path = root_ / "retry_log.json";
    if (!fs::exists(path)) return log;
    auto j = Json::parse(read_file(path), nullptr, false);
    if (!j.is_object()) return log;
    for (int s = 1; s <= kSteps; ++s) {
        log.counts[static_cast<std::size_t>(s - 1)] = j.value(fmt::format("step{}", s), 0);
    }
    return log;
}

void ArtifactStore::save_retry_log(const RetryLog& log) {
    Json j = Json::object();
    for (int s = 1; s <= kSteps; ++s) j[fmt::format("step{}", s)] = log.counts[static_cast<std::size_t>(s - 1)];
    write_file_atomic(root_ / "retry_log.json", dump(j));
}

void ArtifactStore::retain_raw(int step, const std::vector<std::string>& payloads) {
    for (std::size_t i = 0; i < payloads.size(); ++i) {
        write_file_atomic(root_ / "raw" / fmt::format("step{}_attempt{}.txt", step, i), payloads[i]);
    }
}

}  // namespace egoscript
