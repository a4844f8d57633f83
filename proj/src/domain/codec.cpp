#include "egoscript/domain/codec.h"

#include <charconv>
#include <cmath>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace egoscript {

namespace vc = violation_code;

// =============================================================================
// Encoding
// =============================================================================

Json to_json(const ScenarioSpec& x) {
    return Json{{"id", x.id},
                {"title", x.title},
                {"description", x.description},
                {"environment", x.environment},
                {"hazard_category", x.hazard_category}};
}

Json to_json(const InterventionCandidate& x) {
    return Json{{"id", x.id},
                {"scenario_id", x.scenario_id},
                {"description", x.description},
                {"intervention_kind", to_string(x.intervention_kind)},
                {"rationale", x.rationale}};
}

Json to_json(const UserActionCandidate& x) {
    return Json{{"id", x.id},
                {"intervention_id", x.intervention_id},
                {"description", x.description},
                {"causal_explanation", x.causal_explanation}};
}

Json to_json(const SignalSpec& x) {
    return Json{{"id", x.id},
                {"user_action_id", x.user_action_id},
                {"modality", to_string(x.modality)},
                {"cue", x.cue},
                {"trigger_description", x.trigger_description}};
}

Json to_json(const StructuredSeed& x) {
    Json j{{"id", x.id},
           {"intervention_id", x.intervention_id},
           {"user_action_id", x.user_action_id},
           {"signal_ids", x.signal_ids},
           {"mode", to_string(x.mode)},
           {"addressed_to_agent", x.addressed_to_agent},
           {"user_aware", x.user_aware}};
    j["user_utterance"] = x.user_utterance ? Json(*x.user_utterance) : Json(nullptr);
    return j;
}

Json to_json(const Segment& x) {
    return Json{{"kind", to_string(x.kind)},
                {"start_offset_s", x.start_offset_s},
                {"duration_s", x.duration_s},
                {"prompt", x.prompt}};
}

Json to_json(const ScriptContract& x) {
    Json segs = Json::array();
    for (const auto& s : x.segments) segs.push_back(to_json(s));
    return Json{{"seed_id", x.seed_id},
                {"mode", to_string(x.mode)},
                {"camera_angle", x.camera_angle},
                {"lighting", x.lighting},
                {"segments", segs},
                {"expected_hazard_onset_s", x.expected_hazard_onset_s},
                {"trigger_signal_ids", x.trigger_signal_ids}};
}

Json to_json(const VideoRecord& x) {
    Json j{{"id", x.id},
           {"script_ref", x.script_ref},
           {"first_frame_ref", x.first_frame_ref},
           {"video_ref", x.video_ref},
           {"duration_s", x.duration_s},
           {"status", to_string(x.status)}};
    j["alignment_score"] = x.alignment_score ? Json(*x.alignment_score) : Json(nullptr);
    j["error"] = x.error ? Json(*x.error) : Json(nullptr);
    return j;
}

// =============================================================================
// Decoding
// =============================================================================

template <>
Checked<ScenarioSpec> decode<ScenarioSpec>(const Json& j, const std::string& prefix) {
    Violations v;
    JsonReader r(j, prefix, v);
    ScenarioSpec x;
    x.id = r.str("id");
    x.title = r.str("title");
    x.description = r.str("description");
    x.environment = r.str("environment");
    x.hazard_category = r.str("hazard_category");
    if (!v.empty()) return v;
    return x;
}

template <>
Checked<InterventionCandidate> decode<InterventionCandidate>(const Json& j,
                                                             const std::string& prefix) {
    Violations v;
    JsonReader r(j, prefix, v);
    InterventionCandidate x;
    x.id = r.str("id");
    x.scenario_id = r.str("scenario_id");
    x.description = r.str("description");
    x.intervention_kind = r.enumeration("intervention_kind", &parse_intervention_kind,
                                        InterventionKind::SafetyWarning);
    x.rationale = r.str("rationale");
    if (!v.empty()) return v;
    return x;
}

template <>
Checked<UserActionCandidate> decode<UserActionCandidate>(const Json& j,
                                                         const std::string& prefix) {
    Violations v;
    JsonReader r(j, prefix, v);
    UserActionCandidate x;
    x.id = r.str("id");
    x.intervention_id = r.str("intervention_id");
    x.description = r.str("description");
    x.causal_explanation = r.str("causal_explanation");
    if (!v.empty()) return v;
    return x;
}

template <>
Checked<SignalSpec> decode<SignalSpec>(const Json& j, const std::string& prefix) {
    Violations v;
    JsonReader r(j, prefix, v);
    SignalSpec x;
    x.id = r.str("id");
    x.user_action_id = r.str("user_action_id");
    x.modality = r.enumeration("modality", &parse_modality, Modality::Visual);
    x.cue = r.str("cue");
    x.trigger_description = r.str("trigger_description");
    if (!v.empty()) return v;
    return x;
}

template <>
Checked<StructuredSeed> decode<StructuredSeed>(const Json& j, const std::string& prefix) {
    Violations v;
    JsonReader r(j, prefix, v);
    StructuredSeed x;
    x.id = r.str("id");
    x.intervention_id = r.str("intervention_id");
    x.user_action_id = r.str("user_action_id");
    x.signal_ids = r.str_list("signal_ids");
    x.mode = r.enumeration("mode", &parse_assistance_mode, AssistanceMode::Reactive);
    x.user_utterance = r.opt_str("user_utterance");
    x.addressed_to_agent = r.boolean("addressed_to_agent");
    x.user_aware = r.boolean("user_aware");
    if (!v.empty()) return v;
    return x;
}

template <>
Checked<ScriptContract> decode<ScriptContract>(const Json& j, const std::string& prefix) {
    Violations v;
    JsonReader r(j, prefix, v);
    ScriptContract x;
    x.seed_id = r.str("seed_id");
    x.mode = r.enumeration("mode", &parse_assistance_mode, AssistanceMode::Reactive);
    x.camera_angle = r.str("camera_angle");
    x.lighting = r.str("lighting");
    x.expected_hazard_onset_s = r.number("expected_hazard_onset_s");
    x.trigger_signal_ids = r.str_list("trigger_signal_ids");
    if (const Json* segs = r.array("segments")) {
        for (std::size_t i = 0; i < segs->size(); ++i) {
            JsonReader sr((*segs)[i], fmt::format("{}[{}]", r.path("segments"), i), v);
            Segment s;
            s.kind = sr.enumeration("kind", &parse_segment_kind, SegmentKind::SceneSetup);
            s.start_offset_s = sr.number("start_offset_s");
            s.duration_s = sr.number("duration_s");
            s.prompt = sr.str("prompt");
            x.segments.push_back(std::move(s));
        }
    }
    if (!v.empty()) return v;
    return x;
}

template <>
Checked<VideoRecord> decode<VideoRecord>(const Json& j, const std::string& prefix) {
    Violations v;
    JsonReader r(j, prefix, v);
    VideoRecord x;
    x.id = r.str("id");
    x.script_ref = r.str("script_ref");
    x.first_frame_ref = r.str("first_frame_ref");
    x.video_ref = r.str("video_ref");
    x.duration_s = r.number("duration_s");
    x.alignment_score = r.opt_number("alignment_score");
    x.status = r.enumeration("status", &parse_video_status, VideoStatus::Pending);
    x.error = r.opt_str("error");
    if (!v.empty()) return v;
    return x;
}

// =============================================================================
// YAML
// =============================================================================

std::string format_real(double value) { return fmt::format("{}", value); }

namespace {

void emit_script(YAML::Emitter& out, const ScriptContract& c) {
    auto quoted = [&](const std::string& s) { out << YAML::DoubleQuoted << s; };
    out << YAML::BeginMap;
    out << YAML::Key << "seed_id" << YAML::Value;
    quoted(c.seed_id);
    out << YAML::Key << "mode" << YAML::Value;
    quoted(std::string(to_string(c.mode)));
    out << YAML::Key << "camera_angle" << YAML::Value;
    quoted(c.camera_angle);
    out << YAML::Key << "lighting" << YAML::Value;
    quoted(c.lighting);
    out << YAML::Key << "expected_hazard_onset_s" << YAML::Value
        << format_real(c.expected_hazard_onset_s);
    out << YAML::Key << "trigger_signal_ids" << YAML::Value << YAML::BeginSeq;
    for (const auto& id : c.trigger_signal_ids) quoted(id);
    out << YAML::EndSeq;
    out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : c.segments) {
        out << YAML::BeginMap;
        out << YAML::Key << "kind" << YAML::Value;
        quoted(std::string(to_string(s.kind)));
        out << YAML::Key << "start_offset_s" << YAML::Value << format_real(s.start_offset_s);
        out << YAML::Key << "duration_s" << YAML::Value << format_real(s.duration_s);
        out << YAML::Key << "prompt" << YAML::Value;
        quoted(s.prompt);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
}

/// Plain YAML scalars become numbers or booleans when they parse as such;
/// quoted scalars always stay strings.
Json scalar_to_json(const YAML::Node& node) {
    const std::string& text = node.Scalar();
    if (node.Tag() == "!") return text;
    if (text == "true" || text == "True") return true;
    if (text == "false" || text == "False") return false;
    if (text == "~" || text == "null" || text.empty()) return nullptr;
    double d = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, d);
    if (ec == std::errc() && ptr == end) return d;
    return text;
}

Json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Map: {
            Json j = Json::object();
            for (const auto& kv : node) j[kv.first.as<std::string>()] = yaml_to_json(kv.second);
            return j;
        }
        case YAML::NodeType::Sequence: {
            Json j = Json::array();
            for (const auto& item : node) j.push_back(yaml_to_json(item));
            return j;
        }
        case YAML::NodeType::Scalar:
            return scalar_to_json(node);
        default:
            return nullptr;
    }
}

}  // namespace

std::string script_to_yaml(const ScriptContract& contract) {
    YAML::Emitter out;
    emit_script(out, contract);
    return std::string(out.c_str()) + "\n";
}

std::string scripts_to_yaml(std::span<const ScriptContract> contracts) {
    YAML::Emitter out;
    out << YAML::BeginMap << YAML::Key << "scripts" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : contracts) emit_script(out, c);
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

Json yaml_text_to_json(const std::string& text) {
    try {
        return yaml_to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
        throw InputError(std::string("invalid YAML: ") + e.what());
    }
}

Checked<std::vector<ScriptContract>> scripts_from_yaml(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        return Violations{{vc::kMalformedPayload, "", std::string("invalid YAML: ") + e.what()}};
    }
    Json j = yaml_to_json(root);
    if (j.is_object() && j.contains("scripts")) {
        return decode_list<ScriptContract>(j["scripts"], "scripts");
    }
    auto one = decode<ScriptContract>(j);
    if (!one) return one.violations();
    return std::vector<ScriptContract>{std::move(one).value()};
}

}  // namespace egoscript
