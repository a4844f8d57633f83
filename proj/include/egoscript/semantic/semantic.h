#pragma once

#include <optional>
#include <string>
#include <vector>

#include "egoscript/core/error.h"
#include "egoscript/domain/json_reader.h"
#include "egoscript/domain/types.h"

namespace egoscript {

enum class EventType { HazardDetected, SignalDetected, UserAction, Other };

std::string_view to_string(EventType t);
std::optional<EventType> parse_event_type(std::string_view s);

struct VlmEvent {
    double timestamp_s = 0.0;
    EventType event_type = EventType::Other;
    std::string description;
    bool operator==(const VlmEvent&) const = default;
};

/// Hazard-centric scene analysis produced by the VLM.
struct VlmAnalysis {
    std::string identified_hazard;
    std::string proposed_intervention;
    int intervention_urgency = 1;
    std::vector<VlmEvent> events;
    bool operator==(const VlmAnalysis&) const = default;
};

/// Output of the single judge call.
struct JudgeVerdict {
    double helpfulness_score = 0.0;
    double tone_score = 0.0;
    bool over_alert_flag = false;
    std::string reasoning;
    bool operator==(const JudgeVerdict&) const = default;
};

struct ScriptContext {
    std::vector<std::string> actions;
    std::string reasoning;
    std::string hazard_expectation;
    bool operator==(const ScriptContext&) const = default;
};

/// Trace-derived cues summarized for the judge.
struct EvidenceCues {
    double peak_escalation = 0.0;
    std::optional<double> min_distance;
};

struct JudgeInput {
    ScriptContext script_context;
    std::optional<VlmAnalysis> vlm_outputs;
    std::optional<std::string> evidence_summary;
    bool operator==(const JudgeInput&) const = default;
};

/// Parses a raw VLM payload. Urgency must be an integral value in 1..5
/// (3.0 is accepted as 3); event timestamps must lie in [0, video_duration_s].
Checked<VlmAnalysis> parse_vlm_output(std::string_view raw, double video_duration_s);

Checked<JudgeVerdict> parse_judge_output(std::string_view raw);

/// Deterministic assembly of the judge's context. `hazard_expectation`
/// overrides the default onset sentence (use "none" for benign scenes).
JudgeInput build_judge_input(const ScriptContract& script, const VlmAnalysis& analysis,
                             const std::optional<EvidenceCues>& evidence,
                             std::string reasoning = {},
                             std::optional<std::string> hazard_expectation = std::nullopt);

/// Two sentences: peak escalation, then minimum hand-hazard distance.
std::string summarize_evidence(const EvidenceCues& cues);

/// Earliest hazard_detected / signal_detected event time, if any.
std::optional<double> detection_time(const VlmAnalysis& analysis);

Json to_json(const VlmEvent& e);
Json to_json(const VlmAnalysis& a);
Json to_json(const JudgeVerdict& v);
Json to_json(const JudgeInput& in);

/// Prompt text for the VLM scene analysis and the judge call.
std::string vlm_analysis_prompt(const ScriptContract& script);
std::string judge_prompt(const JudgeInput& input);

}  // namespace egoscript
