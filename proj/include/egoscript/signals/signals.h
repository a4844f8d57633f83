#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoscript/core/error.h"
#include "egoscript/domain/json_reader.h"

namespace egoscript {

/// Normalized image coordinates in [0,1]^2.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

struct HazardObservation {
    std::string prompt_id;
    double confidence = 0.0;
    /// Mask area over frame area.
    double area_ratio = 0.0;
    Point2 centroid;
    bool operator==(const HazardObservation&) const = default;
};

/// One analyzed frame of a segmentation trace.
struct FrameObservation {
    int frame_index = 0;
    double timestamp = 0.0;
    std::optional<Point2> hand_centroid;
    std::vector<HazardObservation> hazards;
    bool operator==(const FrameObservation&) const = default;
};

using Trace = std::vector<FrameObservation>;

enum class SafetyAggregator { Max, Mean };

struct SignalConfig {
    int smoothing_window = 3;
    double activity_confidence_threshold = 0.5;
    double proximity_scale = 0.25;
    SafetyAggregator aggregator = SafetyAggregator::Max;
};

Violations validate_signal_config(const SignalConfig& cfg);

/// Per-frame physical signals derived from a trace.
struct SignalSeries {
    std::vector<std::optional<double>> distances;
    std::vector<double> smoothed_areas;
    /// Undefined (nullopt) for the first frame.
    std::vector<std::optional<double>> growth;
    std::vector<double> escalation;
    double safety_stat = 0.0;
};

/// Range and ordering checks: timestamps strictly increasing, every real in range.
Violations validate_trace(std::span<const FrameObservation> trace);

/// Trace file: a JSON array of frame records.
Checked<Trace> parse_trace(const Json& j);
Json to_json(const FrameObservation& f);
Json trace_to_json(std::span<const FrameObservation> trace);

bool is_active(const HazardObservation& h, const SignalConfig& cfg);
bool has_active_hazard(const FrameObservation& frame, const SignalConfig& cfg);

/// Minimum Euclidean distance from the hand to any active hazard centroid.
/// Absent when the hand is not tracked or no hazard is active.
std::optional<double> hand_hazard_distance(const FrameObservation& frame, const SignalConfig& cfg);

/// Sum of active hazards' area ratios, clamped to 1.
double aggregate_area(const FrameObservation& frame, const SignalConfig& cfg);

/// Trailing moving average of the aggregate area with window w, truncated at
/// the start of the trace.
std::vector<double> smooth_area(std::span<const FrameObservation> trace, const SignalConfig& cfg);

/// g_i = (a_i - a_{i-1}) / (t_i - t_{i-1}); g_0 is undefined. Throws
/// InputError on size mismatch, empty input, or non-increasing timestamps.
std::vector<std::optional<double>> area_growth(std::span<const double> smoothed,
                                               std::span<const double> timestamps);

/// e_i = clamp01(smoothed_i) * proximity_i where proximity is 1 without a hand
/// distance and clamp01(1 - d_i / proximity_scale) with one; 0 on frames with
/// no active hazard.
std::vector<double> escalation_curve(std::span<const FrameObservation> trace,
                                     std::span<const std::optional<double>> distances,
                                     std::span<const double> smoothed, const SignalConfig& cfg);

/// Peak (or mean) escalation; InputError on an empty series.
double safety_stat(std::span<const double> escalation,
                   SafetyAggregator aggregator = SafetyAggregator::Max);

/// Validates the trace and computes every series.
SignalSeries compute_signals(std::span<const FrameObservation> trace, const SignalConfig& cfg);

}  // namespace egoscript
