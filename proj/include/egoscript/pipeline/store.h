#pragma once

#include <array>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoscript/domain/types.h"

namespace egoscript {

/// Number of schema-invalid payloads observed per step (index 0 = step 1).
struct RetryLog {
    std::array<int, 5> counts{};
    bool operator==(const RetryLog&) const = default;
};

/// The on-disk artifact store of one scenario:
///
///   scenario.json
///   step1_interventions.json   {"scenario_id", "interventions": [...]}
///   step2_user_actions.json    {"user_actions": [...]}
///   step3_signals_all.json     {"signals": [...]}
///   step4_mode_binding.json    {"seeds": [...]}   three per bound chain
///   script.yaml                scripts: [...]
///   retry_log.json             {"step1": n, ..., "step5": n}
///
/// A step file exists only if every earlier step file exists.
class ArtifactStore {
public:
    static constexpr int kSteps = 5;

    explicit ArtifactStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    static const char* file_name(int step);
    std::filesystem::path step_path(int step) const;

    bool has_step(int step) const;
    /// Highest step N such that steps 1..N all exist.
    int completed_steps() const;

    /// Writes step `step` atomically. Throws OrderError unless steps 1..step-1 exist.
    void write_step(int step, const std::string& content);
    std::string read_step(int step) const;
    /// Deletes step files `step`..5.
    void remove_steps_from(int step);

    bool has_scenario() const;
    ScenarioSpec load_scenario() const;
    void save_scenario(const ScenarioSpec& scenario);

    std::vector<InterventionCandidate> load_interventions() const;
    std::vector<UserActionCandidate> load_user_actions() const;
    std::vector<SignalSpec> load_signals() const;
    std::vector<StructuredSeed> load_seeds() const;
    std::vector<ScriptContract> load_scripts() const;

    static std::string encode_interventions(const std::string& scenario_id,
                                            std::span<const InterventionCandidate> items);
    static std::string encode_user_actions(std::span<const UserActionCandidate> items);
    static std::string encode_signals(std::span<const SignalSpec> items);
    static std::string encode_seeds(std::span<const StructuredSeed> items);
    static std::string encode_scripts(std::span<const ScriptContract> items);

    /// Every artifact currently on disk (missing steps load as empty lists).
    ArtifactSet artifact_set() const;

    RetryLog load_retry_log() const;
    void save_retry_log(const RetryLog& log);

    /// Keeps the raw payloads of a failed step under raw/.
    void retain_raw(int step, const std::vector<std::string>& payloads);

private:
    std::string read_file(const std::filesystem::path& p) const;

    std::filesystem::path root_;
};

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Process-wide writer lock for the store rooted at `root`.
std::mutex& store_lock(const std::filesystem::path& root);

}  // namespace egoscript
