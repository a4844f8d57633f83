#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egoscript/core/error.h"
#include "egoscript/domain/json_reader.h"
#include "egoscript/domain/types.h"
#include "egoscript/semantic/semantic.h"
#include "egoscript/signals/signals.h"

namespace egoscript {

// =============================================================================
// Configuration
// =============================================================================

struct ToleranceWindow {
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    double rho_early = 5.0;
    double rho_late = 10.0;
    bool operator==(const ToleranceWindow&) const = default;
};

Violations validate_window(const ToleranceWindow& w);

/// Tolerance windows keyed on (mode, hazard_category). A lookup falls back to
/// the mode-only entry when no category-specific window is configured.
class ToleranceTable {
public:
    /// Reactive [0,2], explicit [0,4], implicit [-3,6].
    static ToleranceTable defaults();

    void set(AssistanceMode mode, ToleranceWindow w);
    void set(AssistanceMode mode, const std::string& hazard_category, ToleranceWindow w);
    ToleranceWindow lookup(AssistanceMode mode, const std::string& hazard_category = {}) const;

    Violations validate() const;

private:
    std::map<std::pair<AssistanceMode, std::string>, ToleranceWindow> windows_;
};

struct FusionWeights {
    double w_h = 0.4;
    double w_t = 0.08;
    double w_lat = 0.25;
    double w_sc = 0.20;
    double w_obs = 0.07;
    double p_over_alert = 0.25;
};

/// Default weights in basis points; they must total exactly 10000.
inline constexpr int kWeightBasisPoints[] = {4000, 800, 2500, 2000, 700};
static_assert(kWeightBasisPoints[0] + kWeightBasisPoints[1] + kWeightBasisPoints[2] +
                  kWeightBasisPoints[3] + kWeightBasisPoints[4] == 10000);

/// Throws ConfigError unless every weight is >= 0 and the five component
/// weights sum to 1 within 1e-12.
void audit_weights(const FusionWeights& w);

struct FusionConfig {
    ToleranceTable windows = ToleranceTable::defaults();
    FusionWeights weights;
    SignalConfig signals;
    /// Seconds before the hazard onset included in the observability window.
    double observability_lookback_s = 2.0;
    double gate_threshold = 0.5;
};

// =============================================================================
// Component scores
// =============================================================================

double latency_score(std::optional<double> delta_t, const ToleranceWindow& w);

/// 0.5 * (urgency - 1) / 4 + 0.5 * escalation_stat.
double safety_criticality(int urgency, double escalation_stat);

/// Fraction of frames with timestamp in [max(0, t_h - lookback), t_v or trace
/// end] showing at least one active hazard; 0 for an empty window.
double observability(std::span<const FrameObservation> trace, double t_h, std::optional<double> t_v,
                     const SignalConfig& cfg, double lookback_s = 2.0);

double overall_score(double s_h, double s_t, double s_lat, double s_sc, double s_obs, bool over_alert,
                     const FusionWeights& w = {});

// =============================================================================
// Gate and FPR
// =============================================================================

enum class GateStatus { Valid, Excluded };

std::string_view to_string(GateStatus g);
std::optional<GateStatus> parse_gate_status(std::string_view s);

struct GateResult {
    GateStatus status = GateStatus::Valid;
    /// "alignment_below_threshold" or "unrendered" when excluded.
    std::optional<std::string> reason;
    bool operator==(const GateResult&) const = default;
};

GateResult apply_gate(std::optional<double> alignment_score, double threshold = 0.5);
GateResult apply_gate(const VideoRecord& record, double threshold = 0.5);

struct FprCounts {
    int fp = 0;
    int tn = 0;
    bool operator==(const FprCounts&) const = default;
};

/// FP / (FP + TN); nullopt ("not applicable") when there are no benign videos.
std::optional<double> fpr(const FprCounts& c);

// =============================================================================
// Per-video scoring
// =============================================================================

struct VideoScore {
    std::string video_id;
    AssistanceMode mode = AssistanceMode::Reactive;
    std::optional<double> alignment_score;
    GateStatus gate_status = GateStatus::Valid;
    std::optional<std::string> gate_reason;
    double s_h = 0.0;
    double s_t = 0.0;
    double s_lat = 0.0;
    double e_lat = 1.0;
    double s_sc = 0.0;
    double s_obs = 0.0;
    bool over_alert = false;
    std::optional<double> delta_t_s;
    double s = 0.0;
    /// Scenario hazard_category is "none".
    bool benign = false;
    bool operator==(const VideoScore&) const = default;
};

/// Benign gate-valid videos only. A benign video counts as a false positive
/// when it was flagged over-alert or the VLM reported a detection.
FprCounts accumulate_fpr(std::span<const VideoScore> scores);

struct ScoreInputs {
    const ScriptContract& script;
    const VideoRecord& record;
    /// Empty when no segmentation trace is available.
    std::span<const FrameObservation> trace;
    const VlmAnalysis& analysis;
    const JudgeVerdict& verdict;
    std::string hazard_category;
};

VideoScore score_video(const ScoreInputs& in, const FusionConfig& cfg = {});

Json to_json(const VideoScore& s);
Checked<VideoScore> decode_video_score(const Json& j);

}  // namespace egoscript
