#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace egoscript {

// =============================================================================
// Closed vocabularies
// =============================================================================

enum class InterventionKind { SafetyWarning, ProactiveHelp, SocialAdherence, CommandResponse };
enum class Modality { Visual, Audio };
enum class AssistanceMode { Reactive, ExplicitProactive, ImplicitProactive };
enum class SegmentKind { SceneSetup, UserAction, InterventionTrigger, ExitState };
enum class VideoStatus { Pending, Rendered, Failed };

inline constexpr AssistanceMode kAllModes[] = {AssistanceMode::Reactive,
                                               AssistanceMode::ExplicitProactive,
                                               AssistanceMode::ImplicitProactive};

/// Contract order of the four script segments.
inline constexpr SegmentKind kSegmentOrder[] = {SegmentKind::SceneSetup, SegmentKind::UserAction,
                                                SegmentKind::InterventionTrigger,
                                                SegmentKind::ExitState};

std::string_view to_string(InterventionKind k);
std::string_view to_string(Modality m);
std::string_view to_string(AssistanceMode m);
std::string_view to_string(SegmentKind k);
std::string_view to_string(VideoStatus s);

std::optional<InterventionKind> parse_intervention_kind(std::string_view s);
std::optional<Modality> parse_modality(std::string_view s);
std::optional<AssistanceMode> parse_assistance_mode(std::string_view s);
std::optional<SegmentKind> parse_segment_kind(std::string_view s);
std::optional<VideoStatus> parse_video_status(std::string_view s);

// =============================================================================
// Pipeline artifacts
// =============================================================================

struct ScenarioSpec {
    std::string id;
    std::string title;
    std::string description;
    std::string environment;
    std::string hazard_category;

    bool operator==(const ScenarioSpec&) const = default;
};

struct InterventionCandidate {
    std::string id;
    std::string scenario_id;
    std::string description;
    InterventionKind intervention_kind = InterventionKind::SafetyWarning;
    std::string rationale;

    bool operator==(const InterventionCandidate&) const = default;
};

struct UserActionCandidate {
    std::string id;
    std::string intervention_id;
    std::string description;
    std::string causal_explanation;

    bool operator==(const UserActionCandidate&) const = default;
};

struct SignalSpec {
    std::string id;
    std::string user_action_id;
    Modality modality = Modality::Visual;
    std::string cue;
    std::string trigger_description;

    bool operator==(const SignalSpec&) const = default;
};

/// Mode-bound scenario seed. `addressed_to_agent` is set by the generating
/// step; validators never infer it from the utterance text.
struct StructuredSeed {
    std::string id;
    std::string intervention_id;
    std::string user_action_id;
    std::vector<std::string> signal_ids;
    AssistanceMode mode = AssistanceMode::Reactive;
    std::optional<std::string> user_utterance;
    bool addressed_to_agent = false;
    bool user_aware = false;

    bool operator==(const StructuredSeed&) const = default;
};

struct Segment {
    SegmentKind kind = SegmentKind::SceneSetup;
    double start_offset_s = 0.0;
    double duration_s = 0.0;
    std::string prompt;

    double end_s() const { return start_offset_s + duration_s; }
    bool operator==(const Segment&) const = default;
};

/// The four-segment contract between script generation and video synthesis.
struct ScriptContract {
    std::string seed_id;
    AssistanceMode mode = AssistanceMode::Reactive;
    std::string camera_angle;
    std::string lighting;
    std::vector<Segment> segments;
    double expected_hazard_onset_s = 0.0;
    std::vector<std::string> trigger_signal_ids;

    /// Segment of the given kind, or nullptr.
    const Segment* segment(SegmentKind kind) const;
    double total_duration_s() const;

    bool operator==(const ScriptContract&) const = default;
};

struct VideoRecord {
    std::string id;
    std::string script_ref;
    std::string first_frame_ref;
    std::string video_ref;
    double duration_s = 0.0;
    std::optional<double> alignment_score;
    VideoStatus status = VideoStatus::Pending;
    std::optional<std::string> error;

    bool operator==(const VideoRecord&) const = default;
};

/// Everything the pipeline has produced for one scenario, used to resolve
/// references during validation.
struct ArtifactSet {
    std::vector<ScenarioSpec> scenarios;
    std::vector<InterventionCandidate> interventions;
    std::vector<UserActionCandidate> user_actions;
    std::vector<SignalSpec> signals;
    std::vector<StructuredSeed> seeds;

    const ScenarioSpec* find_scenario(std::string_view id) const;
    const InterventionCandidate* find_intervention(std::string_view id) const;
    const UserActionCandidate* find_user_action(std::string_view id) const;
    const SignalSpec* find_signal(std::string_view id) const;
    const StructuredSeed* find_seed(std::string_view id) const;
};

}  // namespace egoscript
