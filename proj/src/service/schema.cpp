#include <fmt/format.h>

#include "egoscript/fusion/fusion.h"
#include "egoscript/semantic/semantic.h"
#include "egoscript/service/service.h"

namespace egoscript {

namespace {

Json str() { return {{"type", "string"}}; }
Json text() { return {{"type", "string"}, {"minLength", 1}}; }
Json real() { return {{"type", "number"}}; }
Json unit() { return {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}; }
Json boolean() { return {{"type", "boolean"}}; }
Json nullable(Json t) { return {{"anyOf", Json::array({std::move(t), Json{{"type", "null"}}})}}; }
Json list_of(Json t) { return {{"type", "array"}, {"items", std::move(t)}}; }
Json ref(const char* name) { return {{"$ref", fmt::format("#/$defs/{}", name)}}; }

template <class E, std::size_t N>
Json enumeration(const E (&values)[N]) {
    Json vals = Json::array();
    for (auto v : values) vals.push_back(to_string(v));
    return {{"type", "string"}, {"enum", vals}};
}

Json object(Json props, std::vector<std::string> required) {
    return {{"type", "object"}, {"properties", std::move(props)}, {"required", std::move(required)}};
}

Json all_required(Json props) {
    std::vector<std::string> req;
    for (const auto& [k, _] : props.items()) req.push_back(k);
    return object(std::move(props), std::move(req));
}

}  // namespace

Json schema_document() {
    constexpr InterventionKind kinds[] = {InterventionKind::SafetyWarning, InterventionKind::ProactiveHelp,
                                          InterventionKind::SocialAdherence, InterventionKind::CommandResponse};
    constexpr Modality modalities[] = {Modality::Visual, Modality::Audio};
    constexpr VideoStatus statuses[] = {VideoStatus::Pending, VideoStatus::Rendered, VideoStatus::Failed};
    constexpr EventType events[] = {EventType::HazardDetected, EventType::SignalDetected, EventType::UserAction,
                                    EventType::Other};
    constexpr GateStatus gates[] = {GateStatus::Valid, GateStatus::Excluded};

    Json defs;
    defs["ScenarioSpec"] = all_required(
        {{"id", text()}, {"title", text()}, {"description", text()}, {"environment", text()},
         {"hazard_category", text()}});
    defs["InterventionCandidate"] = all_required({{"id", text()},
                                                  {"scenario_id", text()},
                                                  {"description", text()},
                                                  {"intervention_kind", enumeration(kinds)},
                                                  {"rationale", text()}});
    defs["UserActionCandidate"] = all_required(
        {{"id", text()}, {"intervention_id", text()}, {"description", text()}, {"causal_explanation", text()}});
    defs["SignalSpec"] = all_required({{"id", text()},
                                       {"user_action_id", text()},
                                       {"modality", enumeration(modalities)},
                                       {"cue", text()},
                                       {"trigger_description", text()}});
    defs["StructuredSeed"] = object({{"id", text()},
                                     {"intervention_id", text()},
                                     {"user_action_id", text()},
                                     {"signal_ids", {{"type", "array"}, {"items", text()}, {"minItems", 1}}},
                                     {"mode", enumeration(kAllModes)},
                                     {"user_utterance", nullable(text())},
                                     {"addressed_to_agent", boolean()},
                                     {"user_aware", boolean()}},
                                    {"id", "intervention_id", "user_action_id", "signal_ids", "mode",
                                     "addressed_to_agent", "user_aware"});
    defs["StructuredSeed"]["x-mode-rules"] = {
        {"reactive", {{"user_utterance", "required"}, {"addressed_to_agent", true}, {"user_aware", true}}},
        {"explicit_proactive", {{"user_utterance", "required"}, {"addressed_to_agent", false}, {"user_aware", true}}},
        {"implicit_proactive", {{"user_utterance", "absent"}, {"addressed_to_agent", false}, {"user_aware", false}}}};
    defs["Segment"] = all_required({{"kind", enumeration(kSegmentOrder)},
                                    {"start_offset_s", {{"type", "number"}, {"minimum", 0}}},
                                    {"duration_s", {{"type", "number"}, {"exclusiveMinimum", 0}}},
                                    {"prompt", text()}});
    defs["ScriptContract"] = all_required(
        {{"seed_id", text()},
         {"mode", enumeration(kAllModes)},
         {"camera_angle", text()},
         {"lighting", text()},
         {"segments", {{"type", "array"}, {"items", ref("Segment")}, {"minItems", 4}, {"maxItems", 4}}},
         {"expected_hazard_onset_s", real()},
         {"trigger_signal_ids", list_of(text())}});
    defs["ScriptContract"]["x-rules"] = {
        "segments appear once each in the order scene_setup, user_action, intervention_trigger, exit_state",
        "each segment starts where the previous one ends",
        "expected_hazard_onset_s lies within the intervention_trigger segment"};
    defs["VideoRecord"] = all_required({{"id", text()},
                                        {"script_ref", str()},
                                        {"first_frame_ref", str()},
                                        {"video_ref", str()},
                                        {"duration_s", real()},
                                        {"alignment_score", nullable(unit())},
                                        {"status", enumeration(statuses)},
                                        {"error", nullable(str())}});
    defs["VlmAnalysis"] = all_required(
        {{"identified_hazard", str()},
         {"proposed_intervention", str()},
         {"intervention_urgency", {{"type", "integer"}, {"minimum", 1}, {"maximum", 5}}},
         {"events", list_of(all_required({{"timestamp_s", {{"type", "number"}, {"minimum", 0}}},
                                          {"event_type", enumeration(events)},
                                          {"description", str()}}))}});
    defs["JudgeVerdict"] = all_required(
        {{"helpfulness_score", unit()}, {"tone_score", unit()}, {"over_alert_flag", boolean()}, {"reasoning", str()}});
    defs["VideoScore"] = all_required({{"video_id", text()},
                                       {"mode", enumeration(kAllModes)},
                                       {"alignment_score", nullable(unit())},
                                       {"gate_status", enumeration(gates)},
                                       {"gate_reason", nullable(str())},
                                       {"s_h", unit()},
                                       {"s_t", unit()},
                                       {"s_lat", unit()},
                                       {"e_lat", unit()},
                                       {"s_sc", unit()},
                                       {"s_obs", unit()},
                                       {"over_alert", boolean()},
                                       {"delta_t_s", nullable(real())},
                                       {"s", {{"type", "number"}, {"minimum", -0.25}, {"maximum", 1}}},
                                       {"benign", boolean()}});
    defs["ReportRow"] = all_required({{"mode_label", text()},
                                      {"total", {{"type", "integer"}, {"minimum", 0}}},
                                      {"valid", {{"type", "integer"}, {"minimum", 0}}},
                                      {"excluded", {{"type", "integer"}, {"minimum", 0}}},
                                      {"overall", nullable(real())},
                                      {"helpfulness", nullable(unit())},
                                      {"tone", nullable(unit())},
                                      {"latency_err", nullable(unit())},
                                      {"safety_crit", nullable(unit())}});
    defs["Point"] = {{"type", "array"}, {"items", unit()}, {"minItems", 2}, {"maxItems", 2}};
    defs["TraceFrame"] = object({{"frame_index", {{"type", "integer"}, {"minimum", 0}}},
                                 {"timestamp", real()},
                                 {"hand_centroid", nullable(ref("Point"))},
                                 {"hazards", list_of(all_required({{"prompt_id", str()},
                                                                   {"confidence", unit()},
                                                                   {"area_ratio", unit()},
                                                                   {"centroid", ref("Point")}}))}},
                                {"frame_index", "timestamp", "hazards"});
    defs["Violation"] = all_required({{"code", str()}, {"path", str()}, {"message", str()}});

    Json steps = Json::array();
    steps.push_back({{"step", 1}, {"name", "interventions"}, {"body", object({{"scenario_id", text()}, {"interventions", list_of(ref("InterventionCandidate"))}}, {"interventions"})}});
    steps.push_back({{"step", 2}, {"name", "user_actions"}, {"body", all_required({{"user_actions", list_of(ref("UserActionCandidate"))}})}});
    steps.push_back({{"step", 3}, {"name", "signals"}, {"body", all_required({{"signals", list_of(ref("SignalSpec"))}})}});
    steps.push_back({{"step", 4}, {"name", "mode_binding"}, {"body", all_required({{"seeds", list_of(ref("StructuredSeed"))}})}});
    steps.push_back({{"step", 5}, {"name", "script"}, {"body", object({{"scripts", list_of(ref("ScriptContract"))}, {"yaml", str()}}, {})}});

    return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
            {"title", "egoscript artifacts"},
            {"$defs", defs},
            {"steps", steps},
            {"error", all_required({{"error", object({{"code", str()},
                                                      {"message", str()},
                                                      {"violations", list_of(ref("Violation"))}},
                                                     {"code", "message"})}})}};
}

}  // namespace egoscript
