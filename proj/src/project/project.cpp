#include "egoscript/project/project.h"

#include <algorithm>

#include <fmt/format.h>

#include "egoscript/core/hash.h"
#include "egoscript/domain/codec.h"
#include "egoscript/domain/validation.h"

namespace egoscript {

namespace fs = std::filesystem;

namespace {

template <class T>
std::vector<T> decode_body_list(const Json& body, const char* key) {
    if (!body.is_object() || !body.contains(key)) {
        throw ValidationError(fmt::format("artifact body needs a '{}' list", key),
                              {{violation_code::kMissingField, key, fmt::format("missing field '{}'", key)}});
    }
    auto items = decode_list<T>(body[key], key);
    if (!items) throw ValidationError("artifact failed schema validation", items.violations());
    return std::move(items).value();
}

void throw_if(const Violations& v, const char* what) {
    if (!v.empty()) throw ValidationError(what, v);
}

}  // namespace

// =============================================================================
// Offline evaluation
// =============================================================================

EvidenceCues evidence_from_signals(const SignalSeries& series) {
    EvidenceCues cues;
    cues.peak_escalation = series.escalation.empty()
                               ? 0.0
                               : *std::max_element(series.escalation.begin(), series.escalation.end());
    for (const auto& d : series.distances) {
        if (d && (!cues.min_distance || *d < *cues.min_distance)) cues.min_distance = d;
    }
    return cues;
}

VideoScore evaluate_from_fixtures(const ScriptContract& script, const VideoRecord& record,
                                  std::span<const FrameObservation> trace, std::string_view vlm_raw,
                                  std::string_view judge_raw, const std::string& hazard_category,
                                  const FusionConfig& cfg) {
    const double duration = record.duration_s > 0 ? record.duration_s : script.total_duration_s();
    auto analysis = parse_vlm_output(vlm_raw, duration);
    if (!analysis) throw ValidationError("VLM payload failed schema validation", analysis.violations());
    auto verdict = parse_judge_output(judge_raw);
    if (!verdict) throw ValidationError("judge payload failed schema validation", verdict.violations());
    return score_video({script, record, trace, analysis.value(), verdict.value(), hazard_category}, cfg);
}

// =============================================================================
// Project
// =============================================================================

Project::Project(fs::path root, ProjectConfig cfg, std::shared_ptr<Gateway> gateway)
    : root_(std::move(root)),
      cfg_(std::move(cfg)),
      gateway_(gateway ? std::move(gateway) : std::make_shared<Gateway>(cfg_.backends)),
      store_(root_),
      videos_(root_) {
    audit_weights(cfg_.fusion.weights);
}

std::string Project::create(const fs::path& projects_root, const ScenarioSpec& scenario) {
    throw_if(validate_scenario(scenario), "invalid scenario");
    const auto id = content_id("proj", to_json(scenario).dump());
    const auto root = projects_root / id;
    std::lock_guard lock(store_lock(root));
    ArtifactStore store(root);
    if (!store.has_scenario()) store.save_scenario(scenario);
    return id;
}

bool Project::exists(const fs::path& projects_root, const std::string& id) {
    if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos) return false;
    return ArtifactStore(projects_root / id).has_scenario();
}

RunSummary Project::run_pipeline() {
    Orchestrator orch(gateway_->text(), cfg_.pipeline);
    return orch.run_pipeline(store_.load_scenario(), store_);
}

void Project::run_step(int step) {
    if (step < 1 || step > ArtifactStore::kSteps) throw InputError(fmt::format("no step {}", step));
    Orchestrator orch(gateway_->text(), cfg_.pipeline);
    orch.run_step(step, store_);
}

Json Project::step_artifact(int step) const {
    if (step < 1 || step > ArtifactStore::kSteps) throw InputError(fmt::format("no step {}", step));
    if (!store_.has_step(step)) throw NotFoundError(fmt::format("step {} has not run", step));
    if (step < 5) return Json::parse(store_.read_step(step));
    const auto scripts = store_.load_scripts();
    return Json{{"scripts", to_json_list<ScriptContract>(scripts)}};
}

void Project::replace_step(int step, const Json& body) {
    if (step < 1 || step > ArtifactStore::kSteps) throw InputError(fmt::format("no step {}", step));
    std::lock_guard lock(store_lock(store_.root()));
    for (int s = 1; s < step; ++s) {
        if (!store_.has_step(s)) throw OrderError(fmt::format("step {} requires step {} first", step, s));
    }

    ArtifactSet upstream;
    upstream.scenarios.push_back(store_.load_scenario());
    if (step > 1) upstream.interventions = store_.load_interventions();
    if (step > 2) upstream.user_actions = store_.load_user_actions();
    if (step > 3) upstream.signals = store_.load_signals();
    if (step > 4) upstream.seeds = store_.load_seeds();

    std::string content;
    switch (step) {
        case 1: {
            const auto& scenario_id = upstream.scenarios.front().id;
            if (body.is_object() && body.contains("scenario_id") && body["scenario_id"] != scenario_id) {
                throw ValidationError("scenario_id does not match the project",
                                      {{violation_code::kDanglingReference, "scenario_id",
                                        "scenario_id must be " + scenario_id}});
            }
            auto items = decode_body_list<InterventionCandidate>(body, "interventions");
            throw_if(validate_interventions(items, upstream), "interventions failed validation");
            content = ArtifactStore::encode_interventions(scenario_id, items);
            break;
        }
        case 2: {
            auto items = decode_body_list<UserActionCandidate>(body, "user_actions");
            throw_if(validate_user_actions(items, upstream), "user actions failed validation");
            content = ArtifactStore::encode_user_actions(items);
            break;
        }
        case 3: {
            auto items = decode_body_list<SignalSpec>(body, "signals");
            throw_if(validate_signals(items, upstream), "signals failed validation");
            content = ArtifactStore::encode_signals(items);
            break;
        }
        case 4: {
            auto items = decode_body_list<StructuredSeed>(body, "seeds");
            throw_if(validate_seeds(items, upstream), "seeds failed validation");
            content = ArtifactStore::encode_seeds(items);
            break;
        }
        default: {
            std::vector<ScriptContract> items;
            if (body.is_object() && body.contains("yaml") && body["yaml"].is_string()) {
                auto parsed = scripts_from_yaml(body["yaml"].get<std::string>());
                if (!parsed) throw ValidationError("script.yaml failed schema validation", parsed.violations());
                items = std::move(parsed).value();
            } else {
                items = decode_body_list<ScriptContract>(body, "scripts");
            }
            throw_if(validate_scripts(items, upstream), "scripts failed validation");
            content = ArtifactStore::encode_scripts(items);
            break;
        }
    }
    store_.remove_steps_from(step);
    store_.write_step(step, content);
}

VideoRecord Project::generate(const std::string& seed_id) {
    if (!store_.has_step(5)) throw OrderError("scripts have not been generated yet");
    const auto scripts = store_.load_scripts();
    auto it = std::find_if(scripts.begin(), scripts.end(),
                           [&](const ScriptContract& s) { return s.seed_id == seed_id; });
    if (it == scripts.end()) throw NotFoundError("no script for seed " + seed_id);
    const auto signals = store_.load_signals();
    return synthesize(*it, signals, *gateway_, videos_, cfg_.synthesis);
}

ScriptContract Project::script_for_record(const VideoRecord& record) const {
    for (const auto& s : store_.load_scripts()) {
        if (video_record_id(s) == record.id) return s;
    }
    for (const auto& s : store_.load_scripts()) {
        if (s.seed_id == record.script_ref) return s;
    }
    throw NotFoundError("no script matches video " + record.id);
}

VideoScore Project::evaluate(const std::string& video_id, const std::optional<Trace>& trace) {
    auto record = videos_.load(video_id);
    if (!record) throw NotFoundError("no video " + video_id);
    if (record->status != VideoStatus::Rendered || record->video_ref.empty()) {
        throw InputError("video " + video_id + " is not rendered");
    }
    const auto script = script_for_record(*record);
    const auto scenario = store_.load_scenario();
    const bool benign = scenario.hazard_category == "none";

    auto analysis = parse_vlm_output(gateway_->vlm().analyze_video(record->video_ref, vlm_analysis_prompt(script)),
                                     record->duration_s);
    if (!analysis) throw ValidationError("VLM payload failed schema validation", analysis.violations());

    std::optional<EvidenceCues> evidence;
    if (trace && !trace->empty()) evidence = evidence_from_signals(compute_signals(*trace, cfg_.fusion.signals));
    const auto input = build_judge_input(script, analysis.value(), evidence, scenario.description,
                                         benign ? std::optional<std::string>("none") : std::nullopt);
    auto verdict = parse_judge_output(gateway_->judge().judge(to_json(input)));
    if (!verdict) throw ValidationError("judge payload failed schema validation", verdict.violations());

    const std::span<const FrameObservation> frames = trace ? std::span<const FrameObservation>(*trace)
                                                           : std::span<const FrameObservation>();
    auto score = score_video({script, *record, frames, analysis.value(), verdict.value(), scenario.hazard_category},
                             cfg_.fusion);
    save_score(score);
    return score;
}

void Project::save_score(const VideoScore& score) {
    write_file_atomic(root_ / "analysis" / (score.video_id + ".json"), to_json(score).dump(2) + "\n");
}

std::vector<VideoScore> Project::scores() const {
    std::vector<VideoScore> out;
    const auto dir = root_ / "analysis";
    if (!fs::exists(dir)) return out;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        auto s = decode_video_score(Json::parse(read_text_file(p)));
        if (!s) throw ValidationError("invalid analysis file " + p.string(), s.violations());
        out.push_back(std::move(s).value());
    }
    return out;
}

Report Project::report() const {
    const auto all = scores();
    return build_report(all);
}

std::vector<fs::path> Project::write_reports(const Report& report) {
    std::vector<fs::path> out;
    for (auto f : {ExportFormat::Json, ExportFormat::Csv, ExportFormat::Text}) {
        auto p = root_ / "reports" / fmt::format("report.{}", file_extension(f));
        write_file_atomic(p, export_report(report, f));
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace egoscript
