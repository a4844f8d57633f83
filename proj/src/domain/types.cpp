#include "egoscript/domain/types.h"

#include <algorithm>
#include <array>
#include <utility>

namespace egoscript {

namespace {

template <class E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "unknown";
}

template <class E, std::size_t N>
std::optional<E> parse_from(const std::array<std::pair<E, std::string_view>, N>& table,
                            std::string_view s) {
    for (const auto& [e, name] : table) {
        if (name == s) return e;
    }
    return std::nullopt;
}

constexpr std::array<std::pair<InterventionKind, std::string_view>, 4> kInterventionKinds{{
    {InterventionKind::SafetyWarning, "safety_warning"},
    {InterventionKind::ProactiveHelp, "proactive_help"},
    {InterventionKind::SocialAdherence, "social_adherence"},
    {InterventionKind::CommandResponse, "command_response"},
}};

constexpr std::array<std::pair<Modality, std::string_view>, 2> kModalities{{
    {Modality::Visual, "visual"},
    {Modality::Audio, "audio"},
}};

constexpr std::array<std::pair<AssistanceMode, std::string_view>, 3> kModes{{
    {AssistanceMode::Reactive, "reactive"},
    {AssistanceMode::ExplicitProactive, "explicit_proactive"},
    {AssistanceMode::ImplicitProactive, "implicit_proactive"},
}};

constexpr std::array<std::pair<SegmentKind, std::string_view>, 4> kSegmentKinds{{
    {SegmentKind::SceneSetup, "scene_setup"},
    {SegmentKind::UserAction, "user_action"},
    {SegmentKind::InterventionTrigger, "intervention_trigger"},
    {SegmentKind::ExitState, "exit_state"},
}};

constexpr std::array<std::pair<VideoStatus, std::string_view>, 3> kStatuses{{
    {VideoStatus::Pending, "pending"},
    {VideoStatus::Rendered, "rendered"},
    {VideoStatus::Failed, "failed"},
}};

template <class T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
    auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.id == id; });
    return it == items.end() ? nullptr : &*it;
}

}  // namespace

std::string_view to_string(InterventionKind k) { return name_of(kInterventionKinds, k); }
std::string_view to_string(Modality m) { return name_of(kModalities, m); }
std::string_view to_string(AssistanceMode m) { return name_of(kModes, m); }
std::string_view to_string(SegmentKind k) { return name_of(kSegmentKinds, k); }
std::string_view to_string(VideoStatus s) { return name_of(kStatuses, s); }

std::optional<InterventionKind> parse_intervention_kind(std::string_view s) {
    return parse_from(kInterventionKinds, s);
}
std::optional<Modality> parse_modality(std::string_view s) { return parse_from(kModalities, s); }
std::optional<AssistanceMode> parse_assistance_mode(std::string_view s) {
    return parse_from(kModes, s);
}
std::optional<SegmentKind> parse_segment_kind(std::string_view s) {
    return parse_from(kSegmentKinds, s);
}
std::optional<VideoStatus> parse_video_status(std::string_view s) {
    return parse_from(kStatuses, s);
}

const Segment* ScriptContract::segment(SegmentKind kind) const {
    auto it = std::find_if(segments.begin(), segments.end(),
                           [&](const Segment& s) { return s.kind == kind; });
    return it == segments.end() ? nullptr : &*it;
}

double ScriptContract::total_duration_s() const {
    double end = 0.0;
    for (const auto& s : segments) end = std::max(end, s.end_s());
    return end;
}

const ScenarioSpec* ArtifactSet::find_scenario(std::string_view id) const {
    return find_by_id(scenarios, id);
}
const InterventionCandidate* ArtifactSet::find_intervention(std::string_view id) const {
    return find_by_id(interventions, id);
}
const UserActionCandidate* ArtifactSet::find_user_action(std::string_view id) const {
    return find_by_id(user_actions, id);
}
const SignalSpec* ArtifactSet::find_signal(std::string_view id) const {
    return find_by_id(signals, id);
}
const StructuredSeed* ArtifactSet::find_seed(std::string_view id) const {
    return find_by_id(seeds, id);
}

}  // namespace egoscript
