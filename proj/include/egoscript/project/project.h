#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "egoscript/fusion/fusion.h"
#include "egoscript/gateway/gateway.h"
#include "egoscript/pipeline/orchestrator.h"
#include "egoscript/pipeline/store.h"
#include "egoscript/project/config.h"
#include "egoscript/report/report.h"
#include "egoscript/semantic/semantic.h"
#include "egoscript/signals/signals.h"
#include "egoscript/synthesis/synthesis.h"

namespace egoscript {

/// Offline scoring from fixture payloads. Throws ValidationError when the VLM
/// or judge payload violates its schema.
VideoScore evaluate_from_fixtures(const ScriptContract& script, const VideoRecord& record,
                                  std::span<const FrameObservation> trace, std::string_view vlm_raw,
                                  std::string_view judge_raw, const std::string& hazard_category,
                                  const FusionConfig& cfg = {});

/// Evidence cues for the judge: peak escalation and minimum hand-hazard distance.
EvidenceCues evidence_from_signals(const SignalSeries& series);

/// One project directory:
///
///   <root>/scenario.json, step files, script.yaml, retry_log.json
///   <root>/videos/<video_id>.json
///   <root>/media/<handle>.json
///   <root>/analysis/<video_id>.json
///   <root>/reports/report.{json,csv,txt}
///
/// The directory tree is the only state.
class Project {
public:
    Project(std::filesystem::path root, ProjectConfig cfg, std::shared_ptr<Gateway> gateway = nullptr);

    /// Creates (or reopens) the project for `scenario` under `projects_root`
    /// and returns its id, which is derived from the scenario's content.
    static std::string create(const std::filesystem::path& projects_root, const ScenarioSpec& scenario);
    static bool exists(const std::filesystem::path& projects_root, const std::string& id);

    const std::filesystem::path& root() const { return root_; }
    const ProjectConfig& config() const { return cfg_; }
    ArtifactStore& store() { return store_; }
    VideoStore& videos() { return videos_; }

    RunSummary run_pipeline();
    /// Runs step `step` alone; OrderError when an earlier step is missing.
    void run_step(int step);

    /// The artifact of step `step` as JSON; step 5 is {"scripts": [...]}.
    /// NotFoundError when the step has not run.
    Json step_artifact(int step) const;

    /// Replaces step `step` with a user-edited artifact after validating it
    /// against the upstream steps. Downstream step files are removed.
    /// Throws OrderError, ValidationError or InputError.
    void replace_step(int step, const Json& body);

    /// Synthesizes the script bound to `seed_id`.
    VideoRecord generate(const std::string& seed_id);

    VideoScore evaluate(const std::string& video_id, const std::optional<Trace>& trace = std::nullopt);
    std::vector<VideoScore> scores() const;
    /// Writes analysis/<video_id>.json.
    void save_score(const VideoScore& score);

    Report report() const;
    /// Writes reports/report.{json,csv,txt}; returns the written paths.
    std::vector<std::filesystem::path> write_reports(const Report& report);

private:
    ScriptContract script_for_record(const VideoRecord& record) const;

    std::filesystem::path root_;
    ProjectConfig cfg_;
    std::shared_ptr<Gateway> gateway_;
    ArtifactStore store_;
    VideoStore videos_;
};

}  // namespace egoscript
