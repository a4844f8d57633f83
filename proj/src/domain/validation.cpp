#include "egoscript/domain/validation.h"

#include <cmath>
#include <set>

#include <fmt/format.h>

namespace egoscript {

namespace vc = violation_code;

namespace {

void require_nonempty(Violations& out, const std::string& value, const std::string& path) {
    if (value.empty()) out.push_back({vc::kEmptyField, path, path + " must be non-empty"});
}

std::string at(std::string_view list, std::size_t i, std::string_view field) {
    return fmt::format("{}[{}].{}", list, i, field);
}

/// Prefixes every violation path with `prefix`.
void append_prefixed(Violations& out, const Violations& in, const std::string& prefix) {
    for (auto v : in) {
        v.path = v.path.empty() ? prefix : prefix + "." + v.path;
        out.push_back(std::move(v));
    }
}

template <class T>
void check_unique_ids(Violations& out, std::span<const T> items, std::string_view list) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& id = items[i].id;
        if (id.empty()) {
            out.push_back({vc::kEmptyField, at(list, i, "id"), "id must be non-empty"});
        } else if (!seen.insert(id).second) {
            out.push_back({vc::kDuplicateId, at(list, i, "id"), "duplicate id " + id});
        }
    }
}

}  // namespace

// =============================================================================
// Seeds
// =============================================================================

Violations mode_violations(const StructuredSeed& seed) {
    Violations out;
    const bool has_utterance = seed.user_utterance.has_value() && !seed.user_utterance->empty();
    const auto mode = std::string(to_string(seed.mode));
    auto utterance = [&](const std::string& msg) {
        out.push_back({vc::kModeUtteranceMismatch, "user_utterance", mode + ": " + msg});
    };
    auto awareness = [&](const std::string& msg) {
        out.push_back({vc::kModeAwarenessMismatch, "user_aware", mode + ": " + msg});
    };

    switch (seed.mode) {
        case AssistanceMode::Reactive:
            if (!has_utterance) utterance("utterance required");
            if (!seed.addressed_to_agent) utterance("utterance must be addressed to the agent");
            if (!seed.user_aware) awareness("user must be aware");
            break;
        case AssistanceMode::ExplicitProactive:
            if (!has_utterance) utterance("utterance required");
            if (seed.addressed_to_agent) utterance("utterance must not be addressed to the agent");
            if (!seed.user_aware) awareness("user must be aware");
            break;
        case AssistanceMode::ImplicitProactive:
            if (seed.user_utterance.has_value()) utterance("utterance must be absent");
            if (seed.addressed_to_agent) utterance("no utterance can be addressed to the agent");
            if (seed.user_aware) awareness("user must be unaware");
            break;
    }
    return out;
}

Checked<StructuredSeed> validate_seed(const StructuredSeed& seed, const ArtifactSet& store) {
    Violations out;
    require_nonempty(out, seed.id, "id");

    if (seed.signal_ids.empty()) {
        out.push_back({vc::kEmptySignalList, "signal_ids", "at least one signal is required"});
    }

    const auto* intervention = store.find_intervention(seed.intervention_id);
    if (intervention == nullptr) {
        out.push_back({vc::kDanglingReference, "intervention_id",
                       "unknown intervention '" + seed.intervention_id + "'"});
    }
    const auto* action = store.find_user_action(seed.user_action_id);
    if (action == nullptr) {
        out.push_back({vc::kDanglingReference, "user_action_id",
                       "unknown user action '" + seed.user_action_id + "'"});
    } else if (action->intervention_id != seed.intervention_id) {
        out.push_back({vc::kBrokenCausalChain, "user_action_id",
                       "user action does not derive from intervention " + seed.intervention_id});
    }

    for (std::size_t i = 0; i < seed.signal_ids.size(); ++i) {
        const auto path = fmt::format("signal_ids[{}]", i);
        const auto* signal = store.find_signal(seed.signal_ids[i]);
        if (signal == nullptr) {
            out.push_back({vc::kDanglingReference, path,
                           "unknown signal '" + seed.signal_ids[i] + "'"});
        } else if (signal->user_action_id != seed.user_action_id) {
            out.push_back({vc::kBrokenCausalChain, path,
                           "signal does not belong to user action " + seed.user_action_id});
        }
    }

    auto modes = mode_violations(seed);
    out.insert(out.end(), modes.begin(), modes.end());

    if (!out.empty()) return out;
    return seed;
}

// =============================================================================
// Script contracts
// =============================================================================

Checked<ScriptContract> validate_script(const ScriptContract& contract) {
    Violations out;
    require_nonempty(out, contract.seed_id, "seed_id");
    if (contract.camera_angle.empty()) {
        out.push_back({vc::kEmptyCameraOrLighting, "camera_angle", "camera_angle is required"});
    }
    if (contract.lighting.empty()) {
        out.push_back({vc::kEmptyCameraOrLighting, "lighting", "lighting is required"});
    }

    const auto& segs = contract.segments;
    bool all_kinds_present = true;
    for (auto kind : kSegmentOrder) {
        if (contract.segment(kind) == nullptr) {
            all_kinds_present = false;
            out.push_back({vc::kMissingSegmentKind, "segments",
                           fmt::format("missing segment '{}'", to_string(kind))});
        }
    }
    if (segs.size() != 4) {
        if (all_kinds_present) {
            out.push_back({vc::kCardinality, "segments",
                           fmt::format("expected exactly 4 segments, got {}", segs.size())});
        }
    } else if (all_kinds_present) {
        for (std::size_t i = 0; i < 4; ++i) {
            if (segs[i].kind != kSegmentOrder[i]) {
                out.push_back({vc::kSegmentOrder, fmt::format("segments[{}].kind", i),
                               fmt::format("expected '{}' at position {}",
                                           to_string(kSegmentOrder[i]), i)});
            }
        }
    }

    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        if (!std::isfinite(s.start_offset_s) || s.start_offset_s < 0.0) {
            out.push_back({vc::kSegmentTiming, at("segments", i, "start_offset_s"),
                           "start_offset_s must be finite and >= 0"});
        }
        if (!std::isfinite(s.duration_s) || s.duration_s <= 0.0) {
            out.push_back({vc::kSegmentTiming, at("segments", i, "duration_s"),
                           "duration_s must be finite and > 0"});
        }
        require_nonempty(out, s.prompt, at("segments", i, "prompt"));
        if (i > 0) {
            const double expected = segs[i - 1].end_s();
            const double diff = s.start_offset_s - expected;
            if (!(std::abs(diff) <= kContiguityTolerance_s)) {
                out.push_back({vc::kSegmentOverlapOrGap, at("segments", i, "start_offset_s"),
                               fmt::format("{} of {:.6g} s before segment {}",
                                           diff > 0 ? "gap" : "overlap", std::abs(diff), i)});
            }
        }
    }

    if (const auto* trigger = contract.segment(SegmentKind::InterventionTrigger)) {
        const double onset = contract.expected_hazard_onset_s;
        if (!(onset >= trigger->start_offset_s && onset <= trigger->end_s())) {
            out.push_back({vc::kOnsetOutsideTrigger, "expected_hazard_onset_s",
                           fmt::format("onset {} outside trigger window [{}, {}]", onset,
                                       trigger->start_offset_s, trigger->end_s())});
        }
    }

    if (!out.empty()) return out;
    return contract;
}

Violations validate_scenario(const ScenarioSpec& scenario) {
    Violations out;
    require_nonempty(out, scenario.id, "id");
    require_nonempty(out, scenario.title, "title");
    require_nonempty(out, scenario.description, "description");
    return out;
}

// =============================================================================
// Step artifact lists
// =============================================================================

Violations validate_interventions(std::span<const InterventionCandidate> items,
                                  const ArtifactSet& store) {
    Violations out;
    check_unique_ids(out, items, "interventions");
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& x = items[i];
        if (store.find_scenario(x.scenario_id) == nullptr) {
            out.push_back({vc::kDanglingReference, at("interventions", i, "scenario_id"),
                           "unknown scenario '" + x.scenario_id + "'"});
        }
        require_nonempty(out, x.description, at("interventions", i, "description"));
    }
    return out;
}

Violations validate_user_actions(std::span<const UserActionCandidate> items,
                                 const ArtifactSet& store) {
    Violations out;
    check_unique_ids(out, items, "user_actions");
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& x = items[i];
        if (store.find_intervention(x.intervention_id) == nullptr) {
            out.push_back({vc::kDanglingReference, at("user_actions", i, "intervention_id"),
                           "unknown intervention '" + x.intervention_id + "'"});
        }
        require_nonempty(out, x.description, at("user_actions", i, "description"));
        require_nonempty(out, x.causal_explanation, at("user_actions", i, "causal_explanation"));
    }
    return out;
}

Violations validate_signals(std::span<const SignalSpec> items, const ArtifactSet& store) {
    Violations out;
    check_unique_ids(out, items, "signals");
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& x = items[i];
        if (store.find_user_action(x.user_action_id) == nullptr) {
            out.push_back({vc::kDanglingReference, at("signals", i, "user_action_id"),
                           "unknown user action '" + x.user_action_id + "'"});
        }
        require_nonempty(out, x.cue, at("signals", i, "cue"));
    }
    return out;
}

Violations validate_seeds(std::span<const StructuredSeed> items, const ArtifactSet& store) {
    Violations out;
    check_unique_ids(out, items, "seeds");
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto checked = validate_seed(items[i], store);
        if (!checked) append_prefixed(out, checked.violations(), fmt::format("seeds[{}]", i));
    }
    return out;
}

Violations validate_scripts(std::span<const ScriptContract> items, const ArtifactSet& store) {
    Violations out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& script = items[i];
        const auto prefix = fmt::format("scripts[{}]", i);
        auto checked = validate_script(script);
        if (!checked) append_prefixed(out, checked.violations(), prefix);

        const auto* seed = store.find_seed(script.seed_id);
        if (seed == nullptr) {
            out.push_back({vc::kDanglingReference, prefix + ".seed_id",
                           "unknown seed '" + script.seed_id + "'"});
            continue;
        }
        if (seed->mode != script.mode) {
            out.push_back({vc::kBrokenCausalChain, prefix + ".mode",
                           "script mode differs from its seed's mode"});
        }
        for (std::size_t j = 0; j < script.trigger_signal_ids.size(); ++j) {
            const auto& sid = script.trigger_signal_ids[j];
            const bool in_seed = std::find(seed->signal_ids.begin(), seed->signal_ids.end(),
                                           sid) != seed->signal_ids.end();
            if (!in_seed) {
                out.push_back({vc::kDanglingReference,
                               fmt::format("{}.trigger_signal_ids[{}]", prefix, j),
                               "signal '" + sid + "' is not part of seed " + seed->id});
            }
        }
    }
    return out;
}

Violations validate_video_record(const VideoRecord& record) {
    Violations out;
    require_nonempty(out, record.id, "id");
    require_nonempty(out, record.script_ref, "script_ref");
    if (record.alignment_score.has_value()) {
        if (record.status != VideoStatus::Rendered) {
            out.push_back({vc::kOutOfRange, "alignment_score",
                           "alignment_score is only present on rendered videos"});
        }
        const double a = *record.alignment_score;
        if (!(a >= 0.0 && a <= 1.0)) {
            out.push_back({vc::kScoreRange, "alignment_score", "alignment_score must be in [0,1]"});
        }
    }
    return out;
}

}  // namespace egoscript
