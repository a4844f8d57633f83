#include "egoscript/pipeline/orchestrator.h"

#include <algorithm>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "egoscript/core/hash.h"
#include "egoscript/domain/codec.h"
#include "egoscript/domain/validation.h"
#include "egoscript/pipeline/templates.h"

namespace egoscript {

namespace vc = violation_code;

namespace {

using Vars = std::map<std::string, std::string>;

/// Opens the payload's top-level list `key`, checking its length when `expected` > 0.
const Json* open_list(const std::optional<Json>& payload, const char* key, std::size_t expected,
                      Violations& v) {
    if (!payload) return nullptr;
    JsonReader r(*payload, "", v);
    const Json* list = r.array(key);
    if (list == nullptr) return nullptr;
    if (expected > 0 && list->size() != expected) {
        v.push_back({vc::kCardinality, key,
                     fmt::format("expected {} entries, got {}", expected, list->size())});
    } else if (list->empty()) {
        v.push_back({vc::kCardinality, key, "at least one entry is required"});
    }
    return list;
}

std::string item_path(const char* list, std::size_t i) { return fmt::format("{}[{}]", list, i); }

void nonempty(JsonReader& r, const char* key, const std::string& value, Violations& v) {
    if (r.has(key) && value.empty()) {
        v.push_back({vc::kEmptyField, r.path(key), std::string(key) + " must be non-empty"});
    }
}

std::string join_cues(std::span<const SignalSpec> signals) {
    std::string out;
    for (const auto& s : signals) {
        if (!out.empty()) out += "; ";
        out += fmt::format("[{}] {}", to_string(s.modality), s.cue);
    }
    return out;
}

}  // namespace

// =============================================================================
// Content ids
// =============================================================================

std::string intervention_id_for(const InterventionCandidate& x, int index) {
    return content_id("int", Json{{"scenario_id", x.scenario_id},
                                  {"index", index},
                                  {"description", x.description},
                                  {"intervention_kind", to_string(x.intervention_kind)},
                                  {"rationale", x.rationale}}
                                 .dump());
}

std::string user_action_id_for(const UserActionCandidate& x, int index) {
    return content_id("act", Json{{"intervention_id", x.intervention_id},
                                  {"index", index},
                                  {"description", x.description},
                                  {"causal_explanation", x.causal_explanation}}
                                 .dump());
}

std::string signal_id_for(const SignalSpec& x, int index) {
    return content_id("sig", Json{{"user_action_id", x.user_action_id},
                                  {"index", index},
                                  {"modality", to_string(x.modality)},
                                  {"cue", x.cue},
                                  {"trigger_description", x.trigger_description}}
                                 .dump());
}

std::string seed_id_for(const StructuredSeed& x) {
    auto j = to_json(x);
    j.erase("id");
    return content_id("seed", j.dump());
}

std::string script_id_for(const ScriptContract& x) { return content_id("scr", to_json(x).dump()); }

// =============================================================================
// Regeneration loop
// =============================================================================

namespace {

template <class T>
StepResult<T> generate_validated(BackendClient& text, const PipelineConfig& cfg, int step,
                                 StructuredRequest req, int item_index,
                                 const std::function<Checked<T>(const std::string&)>& parse) {
    std::vector<std::string> raws;
    Violations last;
    int invalid = 0;
    for (int attempt = 0; attempt <= cfg.schema_retry_limit; ++attempt) {
        req.context["item_index"] = item_index;
        req.context["attempt"] = attempt;
        raws.push_back(text.complete_structured(req));
        auto checked = parse(raws.back());
        if (checked) return {std::move(checked).value(), invalid};
        ++invalid;
        last = checked.violations();
    }
    throw StepFailure(step,
                      fmt::format("step {} produced no schema-valid payload in {} attempt(s); first "
                                  "violation: {} at '{}'",
                                  step, raws.size(), last.empty() ? "" : last.front().message,
                                  last.empty() ? "" : last.front().path),
                      std::move(raws), std::move(last));
}

}  // namespace

// =============================================================================
// Steps
// =============================================================================

Orchestrator::Orchestrator(BackendClient& text, PipelineConfig cfg)
    : text_(text), cfg_(std::move(cfg)) {
    if (auto v = validate_pipeline_config(cfg_); !v.empty()) {
        throw ConfigError("invalid pipeline configuration: " + v.front().message);
    }
}

StepResult<std::vector<InterventionCandidate>> Orchestrator::step1_generate_interventions(
    const ScenarioSpec& scenario, int item_index) {
    if (auto v = validate_scenario(scenario); !v.empty()) {
        throw ValidationError("invalid scenario", v);
    }
    StructuredRequest req;
    req.schema_id = schema_id::kStep1;
    req.prompt = render_template(load_template(cfg_.prompt_template_ids[0], cfg_.template_dir),
                                 Vars{{"scenario_title", scenario.title},
                                      {"scenario_description", scenario.description},
                                      {"environment", scenario.environment},
                                      {"hazard_category", scenario.hazard_category},
                                      {"count", std::to_string(cfg_.k_interventions)}});
    req.context = Json{{"scenario", to_json(scenario)}, {"count", cfg_.k_interventions}};

    const auto k = static_cast<std::size_t>(cfg_.k_interventions);
    std::function<Checked<std::vector<InterventionCandidate>>(const std::string&)> parse =
        [&](const std::string& raw) -> Checked<std::vector<InterventionCandidate>> {
        Violations v;
        auto payload = parse_json_payload(raw, v);
        const Json* list = open_list(payload, "interventions", k, v);
        std::vector<InterventionCandidate> out;
        for (std::size_t i = 0; list != nullptr && i < list->size(); ++i) {
            JsonReader r((*list)[i], item_path("interventions", i), v);
            InterventionCandidate x;
            x.scenario_id = scenario.id;
            x.description = r.str("description");
            nonempty(r, "description", x.description, v);
            x.intervention_kind = r.enumeration("intervention_kind", &parse_intervention_kind,
                                                InterventionKind::SafetyWarning);
            x.rationale = r.str("rationale");
            x.id = intervention_id_for(x, static_cast<int>(i));
            out.push_back(std::move(x));
        }
        if (!v.empty()) return v;
        return out;
    };
    return generate_validated(text_, cfg_, 1, std::move(req), item_index, parse);
}

StepResult<std::vector<UserActionCandidate>> Orchestrator::step2_derive_user_actions(
    const InterventionCandidate& intervention, int item_index) {
    StructuredRequest req;
    req.schema_id = schema_id::kStep2;
    req.prompt = render_template(load_template(cfg_.prompt_template_ids[1], cfg_.template_dir),
                                 Vars{{"intervention", intervention.description},
                                      {"intervention_kind",
                                       std::string(to_string(intervention.intervention_kind))},
                                      {"count", std::to_string(cfg_.m_actions)}});
    req.context = Json{{"intervention", to_json(intervention)}, {"count", cfg_.m_actions}};

    const auto m = static_cast<std::size_t>(cfg_.m_actions);
    std::function<Checked<std::vector<UserActionCandidate>>(const std::string&)> parse =
        [&](const std::string& raw) -> Checked<std::vector<UserActionCandidate>> {
        Violations v;
        auto payload = parse_json_payload(raw, v);
        const Json* list = open_list(payload, "user_actions", m, v);
        std::vector<UserActionCandidate> out;
        for (std::size_t i = 0; list != nullptr && i < list->size(); ++i) {
            JsonReader r((*list)[i], item_path("user_actions", i), v);
            UserActionCandidate x;
            x.intervention_id = intervention.id;
            x.description = r.str("description");
            nonempty(r, "description", x.description, v);
            x.causal_explanation = r.str("causal_explanation");
            nonempty(r, "causal_explanation", x.causal_explanation, v);
            x.id = user_action_id_for(x, static_cast<int>(i));
            out.push_back(std::move(x));
        }
        if (!v.empty()) return v;
        return out;
    };
    return generate_validated(text_, cfg_, 2, std::move(req), item_index, parse);
}

StepResult<std::vector<SignalSpec>> Orchestrator::step3_specify_signals(
    const UserActionCandidate& action, const InterventionCandidate& intervention, int item_index) {
    StructuredRequest req;
    req.schema_id = schema_id::kStep3;
    req.prompt = render_template(load_template(cfg_.prompt_template_ids[2], cfg_.template_dir),
                                 Vars{{"intervention", intervention.description},
                                      {"user_action", action.description}});
    req.context = Json{{"user_action", to_json(action)}, {"intervention", to_json(intervention)}};

    std::function<Checked<std::vector<SignalSpec>>(const std::string&)> parse =
        [&](const std::string& raw) -> Checked<std::vector<SignalSpec>> {
        Violations v;
        auto payload = parse_json_payload(raw, v);
        const Json* list = open_list(payload, "signals", 0, v);
        std::vector<SignalSpec> out;
        for (std::size_t i = 0; list != nullptr && i < list->size(); ++i) {
            JsonReader r((*list)[i], item_path("signals", i), v);
            SignalSpec x;
            x.user_action_id = action.id;
            x.modality = r.enumeration("modality", &parse_modality, Modality::Visual);
            x.cue = r.str("cue");
            nonempty(r, "cue", x.cue, v);
            x.trigger_description = r.str("trigger_description");
            x.id = signal_id_for(x, static_cast<int>(i));
            out.push_back(std::move(x));
        }
        if (!v.empty()) return v;
        return out;
    };
    return generate_validated(text_, cfg_, 3, std::move(req), item_index, parse);
}

StepResult<std::vector<StructuredSeed>> Orchestrator::step4_bind_modes(
    const InterventionCandidate& intervention, const UserActionCandidate& action,
    std::span<const SignalSpec> signals, int item_index) {
    if (action.intervention_id != intervention.id) {
        throw IntegrityError("user action " + action.id + " does not derive from " + intervention.id);
    }
    if (signals.empty()) throw IntegrityError("user action " + action.id + " has no signals");
    for (const auto& s : signals) {
        if (s.user_action_id != action.id) {
            throw IntegrityError("signal " + s.id + " does not belong to " + action.id);
        }
    }

    ArtifactSet chain;
    chain.interventions = {intervention};
    chain.user_actions = {action};
    chain.signals.assign(signals.begin(), signals.end());
    std::vector<std::string> signal_ids;
    for (const auto& s : signals) signal_ids.push_back(s.id);

    StructuredRequest req;
    req.schema_id = schema_id::kStep4;
    req.prompt = render_template(load_template(cfg_.prompt_template_ids[3], cfg_.template_dir),
                                 Vars{{"intervention", intervention.description},
                                      {"user_action", action.description},
                                      {"signals", join_cues(signals)}});
    req.context = Json{{"intervention", to_json(intervention)},
                       {"user_action", to_json(action)},
                       {"signals", to_json_list(signals)}};

    std::function<Checked<std::vector<StructuredSeed>>(const std::string&)> parse =
        [&](const std::string& raw) -> Checked<std::vector<StructuredSeed>> {
        Violations v;
        auto payload = parse_json_payload(raw, v);
        const Json* list = open_list(payload, "seeds", 3, v);
        std::vector<StructuredSeed> out;
        for (std::size_t i = 0; list != nullptr && i < list->size(); ++i) {
            const auto prefix = item_path("seeds", i);
            JsonReader r((*list)[i], prefix, v);
            StructuredSeed x;
            x.intervention_id = intervention.id;
            x.user_action_id = action.id;
            x.signal_ids = signal_ids;
            x.mode = r.enumeration("mode", &parse_assistance_mode, AssistanceMode::Reactive);
            x.user_utterance = r.opt_str("user_utterance");
            x.addressed_to_agent = r.boolean("addressed_to_agent");
            x.user_aware = r.boolean("user_aware");
            x.id = seed_id_for(x);
            if (auto checked = validate_seed(x, chain); !checked) {
                for (auto viol : checked.violations()) {
                    viol.path = prefix + "." + viol.path;
                    v.push_back(std::move(viol));
                }
            }
            out.push_back(std::move(x));
        }
        if (out.size() == 3) {
            for (auto mode : kAllModes) {
                auto n = std::count_if(out.begin(), out.end(),
                                       [&](const StructuredSeed& s) { return s.mode == mode; });
                if (n != 1) {
                    v.push_back({vc::kModeCoverage, "seeds",
                                 fmt::format("mode {} appears {} times", to_string(mode), n)});
                }
            }
        }
        if (!v.empty()) return v;
        std::sort(out.begin(), out.end(),
                  [](const StructuredSeed& a, const StructuredSeed& b) { return a.mode < b.mode; });
        return out;
    };
    return generate_validated(text_, cfg_, 4, std::move(req), item_index, parse);
}

StepResult<ScriptContract> Orchestrator::step5_generate_script(const StructuredSeed& seed,
                                                               const ArtifactSet& context,
                                                               int item_index) {
    const auto* intervention = context.find_intervention(seed.intervention_id);
    const auto* action = context.find_user_action(seed.user_action_id);
    if (intervention == nullptr || action == nullptr || context.scenarios.empty()) {
        throw IntegrityError("seed " + seed.id + " does not resolve against its artifacts");
    }
    std::vector<SignalSpec> signals;
    for (const auto& sid : seed.signal_ids) {
        const auto* s = context.find_signal(sid);
        if (s == nullptr) throw IntegrityError("seed " + seed.id + " references unknown signal " + sid);
        signals.push_back(*s);
    }
    const auto& scenario = context.scenarios.front();
    const auto& d = cfg_.default_segment_durations_s;

    StructuredRequest req;
    req.schema_id = schema_id::kStep5;
    req.prompt = render_template(
        load_template(cfg_.prompt_template_ids[4], cfg_.template_dir),
        Vars{{"mode", std::string(to_string(seed.mode))},
             {"scenario_description", scenario.description},
             {"user_action", action->description},
             {"signals", join_cues(signals)},
             {"utterance", seed.user_utterance.value_or("(none)")},
             {"durations", fmt::format("{}, {}, {}, {}", d[0], d[1], d[2], d[3])}});
    req.context = Json{{"seed", to_json(seed)},
                       {"scenario", to_json(scenario)},
                       {"intervention", to_json(*intervention)},
                       {"user_action", to_json(*action)},
                       {"signals", to_json_list(std::span<const SignalSpec>(signals))},
                       {"segment_durations_s", d}};

    std::function<Checked<ScriptContract>(const std::string&)> parse =
        [&](const std::string& raw) -> Checked<ScriptContract> {
        Violations v;
        auto payload = parse_json_payload(raw, v);
        if (!payload) return v;
        JsonReader r(*payload, "", v);
        ScriptContract c;
        c.seed_id = seed.id;
        c.mode = seed.mode;
        c.trigger_signal_ids = seed.signal_ids;
        c.camera_angle = r.str("camera_angle");
        c.lighting = r.str("lighting");
        const auto onset = r.opt_number("expected_hazard_onset_s");
        double offset = 0.0;
        if (const Json* segs = r.array("segments")) {
            for (std::size_t i = 0; i < segs->size(); ++i) {
                JsonReader sr((*segs)[i], item_path("segments", i), v);
                Segment s;
                s.kind = sr.enumeration("kind", &parse_segment_kind, SegmentKind::SceneSetup);
                s.prompt = sr.str("prompt");
                const auto slot = std::min<std::size_t>(static_cast<std::size_t>(s.kind), 3);
                s.duration_s = sr.opt_number("duration_s").value_or(d[slot]);
                s.start_offset_s = offset;
                offset += s.duration_s;
                c.segments.push_back(std::move(s));
            }
        }
        if (const auto* trigger = c.segment(SegmentKind::InterventionTrigger)) {
            c.expected_hazard_onset_s =
                onset.value_or(trigger->start_offset_s + trigger->duration_s / 2.0);
        }
        if (!v.empty()) return v;
        return validate_script(c);
    };
    return generate_validated(text_, cfg_, 5, std::move(req), item_index, parse);
}

// =============================================================================
// Whole-store execution
// =============================================================================

void Orchestrator::execute_step(int step, ArtifactStore& store, RetryLog& log) {
    auto& count = log.counts[static_cast<std::size_t>(step - 1)];
    count = 0;
    const auto fail = [&](const StepFailure& e) {
        count += static_cast<int>(e.raw_payloads().size());
        store.retain_raw(step, e.raw_payloads());
        store.save_retry_log(log);
    };
    try {
        switch (step) {
            case 1: {
                const auto scenario = store.load_scenario();
                auto r = step1_generate_interventions(scenario);
                count += r.invalid_payloads;
                store.write_step(1, ArtifactStore::encode_interventions(scenario.id, r.value));
                break;
            }
            case 2: {
                std::vector<UserActionCandidate> all;
                int i = 0;
                for (const auto& intervention : store.load_interventions()) {
                    auto r = step2_derive_user_actions(intervention, i++);
                    count += r.invalid_payloads;
                    all.insert(all.end(), r.value.begin(), r.value.end());
                }
                store.write_step(2, ArtifactStore::encode_user_actions(all));
                break;
            }
            case 3: {
                const auto set = store.artifact_set();
                std::vector<SignalSpec> all;
                int i = 0;
                for (const auto& action : set.user_actions) {
                    const auto* intervention = set.find_intervention(action.intervention_id);
                    if (intervention == nullptr) {
                        throw IntegrityError("user action " + action.id + " has a dangling intervention");
                    }
                    auto r = step3_specify_signals(action, *intervention, i++);
                    count += r.invalid_payloads;
                    all.insert(all.end(), r.value.begin(), r.value.end());
                }
                store.write_step(3, ArtifactStore::encode_signals(all));
                break;
            }
            case 4: {
                const auto set = store.artifact_set();
                std::vector<StructuredSeed> all;
                int i = 0;
                for (const auto& action : set.user_actions) {
                    const auto* intervention = set.find_intervention(action.intervention_id);
                    if (intervention == nullptr) {
                        throw IntegrityError("user action " + action.id + " has a dangling intervention");
                    }
                    std::vector<SignalSpec> signals;
                    for (const auto& s : set.signals) {
                        if (s.user_action_id == action.id) signals.push_back(s);
                    }
                    auto r = step4_bind_modes(*intervention, action, signals, i++);
                    count += r.invalid_payloads;
                    all.insert(all.end(), r.value.begin(), r.value.end());
                    if (!cfg_.bind_all_chains) break;
                }
                store.write_step(4, ArtifactStore::encode_seeds(all));
                break;
            }
            case 5: {
                const auto set = store.artifact_set();
                std::vector<ScriptContract> all;
                int i = 0;
                for (const auto& seed : set.seeds) {
                    auto r = step5_generate_script(seed, set, i++);
                    count += r.invalid_payloads;
                    all.push_back(std::move(r.value));
                }
                store.write_step(5, ArtifactStore::encode_scripts(all));
                break;
            }
            default:
                throw InputError(fmt::format("no such step {}", step));
        }
    } catch (const StepFailure& e) {
        fail(e);
        throw;
    }
    store.save_retry_log(log);
}

RunSummary Orchestrator::run_pipeline(const ScenarioSpec& scenario, ArtifactStore& store) {
    if (auto v = validate_scenario(scenario); !v.empty()) throw ValidationError("invalid scenario", v);
    std::lock_guard lock(store_lock(store.root()));

    if (store.has_scenario()) {
        if (store.load_scenario() != scenario) {
            throw IntegrityError("store " + store.root().string() + " belongs to a different scenario");
        }
    } else {
        if (store.completed_steps() > 0) {
            throw IntegrityError("store has step files but no scenario.json");
        }
        store.save_scenario(scenario);
    }

    RunSummary summary;
    summary.retry_log = store.load_retry_log();
    for (int step = store.completed_steps() + 1; step <= ArtifactStore::kSteps; ++step) {
        execute_step(step, store, summary.retry_log);
        summary.executed_steps.push_back(step);
    }
    return summary;
}

int Orchestrator::run_step(int step, ArtifactStore& store) {
    if (step < 1 || step > ArtifactStore::kSteps) throw InputError(fmt::format("no such step {}", step));
    std::lock_guard lock(store_lock(store.root()));
    if (!store.has_scenario()) throw OrderError("store has no scenario");
    if (store.completed_steps() < step - 1) {
        throw OrderError(fmt::format("step {} requires steps 1..{} (have {})", step, step - 1,
                                     store.completed_steps()));
    }
    auto log = store.load_retry_log();
    store.remove_steps_from(step);
    execute_step(step, store, log);
    return log.counts[static_cast<std::size_t>(step - 1)];
}

}  // namespace egoscript
