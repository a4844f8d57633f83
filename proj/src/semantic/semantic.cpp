#include "egoscript/semantic/semantic.h"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "egoscript/domain/codec.h"

namespace egoscript {

namespace vc = violation_code;

namespace {

constexpr std::array<std::pair<EventType, std::string_view>, 4> kEventTypes{{
    {EventType::HazardDetected, "hazard_detected"},
    {EventType::SignalDetected, "signal_detected"},
    {EventType::UserAction, "user_action"},
    {EventType::Other, "other"},
}};

double unit_score(JsonReader& r, const char* key, Violations& v) {
    const double s = r.number(key);
    if (r.has(key) && !(s >= 0.0 && s <= 1.0)) {
        v.push_back({vc::kScoreRange, r.path(key), fmt::format("{} must be in [0,1], got {}", key, s)});
    }
    return s;
}

}  // namespace

std::string_view to_string(EventType t) {
    for (const auto& [e, name] : kEventTypes) {
        if (e == t) return name;
    }
    return "other";
}

std::optional<EventType> parse_event_type(std::string_view s) {
    for (const auto& [e, name] : kEventTypes) {
        if (name == s) return e;
    }
    return std::nullopt;
}

// =============================================================================
// Parsers
// =============================================================================

Checked<VlmAnalysis> parse_vlm_output(std::string_view raw, double video_duration_s) {
    Violations v;
    auto payload = parse_json_payload(raw, v);
    if (!payload) return v;
    JsonReader r(*payload, "", v);
    VlmAnalysis a;
    a.identified_hazard = r.str("identified_hazard");
    a.proposed_intervention = r.str("proposed_intervention");

    const double urgency = r.number("intervention_urgency");
    if (r.has("intervention_urgency") && (*payload)["intervention_urgency"].is_number()) {
        if (urgency != std::floor(urgency) || urgency < 1.0 || urgency > 5.0) {
            v.push_back({vc::kUrgencyRange, "intervention_urgency",
                         fmt::format("urgency must be an integer in 1..5, got {}", urgency)});
        } else {
            a.intervention_urgency = static_cast<int>(urgency);
        }
    }

    if (const Json* events = r.array("events")) {
        for (std::size_t i = 0; i < events->size(); ++i) {
            JsonReader er((*events)[i], fmt::format("events[{}]", i), v);
            VlmEvent e;
            e.timestamp_s = er.number("timestamp_s");
            e.event_type = er.enumeration("event_type", &parse_event_type, EventType::Other);
            e.description = er.str("description");
            if (er.has("timestamp_s")) {
                if (e.timestamp_s < 0.0) {
                    v.push_back({vc::kOutOfRange, er.path("timestamp_s"), "event timestamp must be >= 0"});
                } else if (e.timestamp_s > video_duration_s) {
                    v.push_back({vc::kEventBeyondDuration, er.path("timestamp_s"),
                                 fmt::format("event at {} s is beyond the {} s video", e.timestamp_s,
                                             video_duration_s)});
                }
            }
            a.events.push_back(std::move(e));
        }
    }
    if (!v.empty()) return v;
    return a;
}

Checked<JudgeVerdict> parse_judge_output(std::string_view raw) {
    Violations v;
    auto payload = parse_json_payload(raw, v);
    if (!payload) return v;
    JsonReader r(*payload, "", v);
    JudgeVerdict out;
    out.helpfulness_score = unit_score(r, "helpfulness_score", v);
    out.tone_score = unit_score(r, "tone_score", v);
    out.over_alert_flag = r.boolean("over_alert_flag");
    out.reasoning = r.str("reasoning");
    if (!v.empty()) return v;
    return out;
}

// =============================================================================
// Judge input
// =============================================================================

std::string summarize_evidence(const EvidenceCues& cues) {
    std::string out = fmt::format("Peak hazard escalation reached {:.3f} on a 0-1 scale.",
                                  cues.peak_escalation);
    if (cues.min_distance) {
        out += fmt::format(" Minimum hand-hazard distance was {:.3f} in normalized image units.",
                           *cues.min_distance);
    } else {
        out += " The hand was never tracked near an active hazard.";
    }
    return out;
}

JudgeInput build_judge_input(const ScriptContract& script, const VlmAnalysis& analysis,
                             const std::optional<EvidenceCues>& evidence, std::string reasoning,
                             std::optional<std::string> hazard_expectation) {
    JudgeInput in;
    for (auto kind : {SegmentKind::UserAction, SegmentKind::InterventionTrigger}) {
        if (const auto* s = script.segment(kind)) in.script_context.actions.push_back(s->prompt);
    }
    in.script_context.reasoning = std::move(reasoning);
    if (hazard_expectation) {
        in.script_context.hazard_expectation = std::move(*hazard_expectation);
    } else {
        const auto* trigger = script.segment(SegmentKind::InterventionTrigger);
        in.script_context.hazard_expectation =
            fmt::format("Hazard expected at {} s ({} mode){}{}", format_real(script.expected_hazard_onset_s),
                        to_string(script.mode), trigger ? ": " : "", trigger ? trigger->prompt : "");
    }
    in.vlm_outputs = analysis;
    if (evidence) in.evidence_summary = summarize_evidence(*evidence);
    return in;
}

std::optional<double> detection_time(const VlmAnalysis& analysis) {
    std::optional<double> best;
    for (const auto& e : analysis.events) {
        if (e.event_type != EventType::HazardDetected && e.event_type != EventType::SignalDetected) continue;
        if (!best || e.timestamp_s < *best) best = e.timestamp_s;
    }
    return best;
}

// =============================================================================
// Encoding and prompts
// =============================================================================

Json to_json(const VlmEvent& e) {
    return Json{{"timestamp_s", e.timestamp_s},
                {"event_type", to_string(e.event_type)},
                {"description", e.description}};
}

Json to_json(const VlmAnalysis& a) {
    Json events = Json::array();
    for (const auto& e : a.events) events.push_back(to_json(e));
    return Json{{"identified_hazard", a.identified_hazard},
                {"proposed_intervention", a.proposed_intervention},
                {"intervention_urgency", a.intervention_urgency},
                {"events", events}};
}

Json to_json(const JudgeVerdict& v) {
    return Json{{"helpfulness_score", v.helpfulness_score},
                {"tone_score", v.tone_score},
                {"over_alert_flag", v.over_alert_flag},
                {"reasoning", v.reasoning}};
}

Json to_json(const JudgeInput& in) {
    Json j{{"script_context",
            {{"actions", in.script_context.actions},
             {"reasoning", in.script_context.reasoning},
             {"hazard_expectation", in.script_context.hazard_expectation}}}};
    j["vlm_outputs"] = in.vlm_outputs ? to_json(*in.vlm_outputs) : Json(nullptr);
    if (in.evidence_summary) j["evidence_summary"] = *in.evidence_summary;
    return j;
}

std::string vlm_analysis_prompt(const ScriptContract& script) {
    return fmt::format(
        R"(You are watching an egocentric video ({:.1f} s) as a proactive assistant.
Identify the main hazard, propose the intervention you would speak to the user, and rate its
urgency on a 1-5 scale (1 = no action needed, 5 = act immediately). List timestamped events;
event_type is one of hazard_detected, signal_detected, user_action, other.

Respond with JSON: {{"identified_hazard": string, "proposed_intervention": string,
"intervention_urgency": integer 1-5, "events": [{{"timestamp_s", "event_type", "description"}}]}})",
        script.total_duration_s());
}

std::string judge_prompt(const JudgeInput& input) {
    return fmt::format(
        R"(Score the assistant's intervention in one pass.

Rubric:
- helpfulness_score (0.0-1.0): safety correctness, actionability, and hazard resolution utility.
- tone_score (0.0-1.0): urgency-calibrated wording under risk (concise and directive in critical cases).
- over_alert_flag (true|false): flagged when warnings are unnecessary or unsupported by scene evidence.

Context:
{}

Respond with JSON exactly:
{{"helpfulness_score": 0.0-1.0, "tone_score": 0.0-1.0, "over_alert_flag": true|false,
"reasoning": "short justification"}})",
        to_json(input).dump(2));
}

}  // namespace egoscript
