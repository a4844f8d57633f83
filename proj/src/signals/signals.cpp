#include "egoscript/signals/signals.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace egoscript {

namespace vc = violation_code;

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

std::optional<Point2> read_point(const Json& j, const std::string& path, Violations& v) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        v.push_back({vc::kWrongType, path, "point must be [x, y]"});
        return std::nullopt;
    }
    return Point2{j[0].get<double>(), j[1].get<double>()};
}

Json point_json(const Point2& p) { return Json::array({p.x, p.y}); }

}  // namespace

Violations validate_signal_config(const SignalConfig& cfg) {
    Violations out;
    if (cfg.smoothing_window < 1) {
        out.push_back({vc::kOutOfRange, "smoothing_window", "smoothing_window must be >= 1"});
    }
    if (!(cfg.proximity_scale > 0.0)) {
        out.push_back({vc::kOutOfRange, "proximity_scale", "proximity_scale must be > 0"});
    }
    if (!std::isfinite(cfg.activity_confidence_threshold)) {
        out.push_back({vc::kOutOfRange, "activity_confidence_threshold", "threshold must be finite"});
    }
    return out;
}

// =============================================================================
// Trace I/O
// =============================================================================

Violations validate_trace(std::span<const FrameObservation> trace) {
    Violations out;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& f = trace[i];
        const auto at = [&](const std::string& field) { return fmt::format("[{}].{}", i, field); };
        if (f.frame_index < 0) out.push_back({vc::kOutOfRange, at("frame_index"), "frame_index must be >= 0"});
        if (!std::isfinite(f.timestamp)) out.push_back({vc::kOutOfRange, at("timestamp"), "timestamp must be finite"});
        if (i > 0 && !(f.timestamp > trace[i - 1].timestamp)) {
            out.push_back({vc::kOutOfRange, at("timestamp"), "timestamps must be strictly increasing"});
        }
        if (f.hand_centroid && !(in_unit(f.hand_centroid->x) && in_unit(f.hand_centroid->y))) {
            out.push_back({vc::kOutOfRange, at("hand_centroid"), "hand_centroid must lie in [0,1]^2"});
        }
        for (std::size_t h = 0; h < f.hazards.size(); ++h) {
            const auto& hz = f.hazards[h];
            const auto hat = [&](const char* field) { return fmt::format("[{}].hazards[{}].{}", i, h, field); };
            if (!in_unit(hz.confidence)) out.push_back({vc::kOutOfRange, hat("confidence"), "confidence must be in [0,1]"});
            if (!in_unit(hz.area_ratio)) out.push_back({vc::kOutOfRange, hat("area_ratio"), "area_ratio must be in [0,1]"});
            if (!(in_unit(hz.centroid.x) && in_unit(hz.centroid.y))) {
                out.push_back({vc::kOutOfRange, hat("centroid"), "centroid must lie in [0,1]^2"});
            }
        }
    }
    return out;
}

Checked<Trace> parse_trace(const Json& j) {
    Violations v;
    if (!j.is_array()) return Violations{{vc::kWrongType, "", "trace must be a JSON array of frames"}};
    Trace trace;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto prefix = fmt::format("[{}]", i);
        JsonReader r(j[i], prefix, v);
        FrameObservation f;
        f.frame_index = static_cast<int>(r.number("frame_index"));
        f.timestamp = r.number("timestamp");
        if (r.has("hand_centroid")) f.hand_centroid = read_point(j[i]["hand_centroid"], r.path("hand_centroid"), v);
        if (const Json* hz = r.array("hazards")) {
            for (std::size_t h = 0; h < hz->size(); ++h) {
                const auto hp = fmt::format("{}.hazards[{}]", prefix, h);
                JsonReader hr((*hz)[h], hp, v);
                HazardObservation o;
                o.prompt_id = hr.str("prompt_id");
                o.confidence = hr.number("confidence");
                o.area_ratio = hr.number("area_ratio");
                if (hr.has("centroid")) {
                    if (auto p = read_point((*hz)[h]["centroid"], hr.path("centroid"), v)) o.centroid = *p;
                } else {
                    hr.add(vc::kMissingField, "centroid", "missing field 'centroid'");
                }
                f.hazards.push_back(std::move(o));
            }
        }
        trace.push_back(std::move(f));
    }
    if (v.empty()) v = validate_trace(trace);
    if (!v.empty()) return v;
    return trace;
}

Json to_json(const FrameObservation& f) {
    Json hazards = Json::array();
    for (const auto& h : f.hazards) {
        hazards.push_back({{"prompt_id", h.prompt_id},
                           {"confidence", h.confidence},
                           {"area_ratio", h.area_ratio},
                           {"centroid", point_json(h.centroid)}});
    }
    Json j{{"frame_index", f.frame_index}, {"timestamp", f.timestamp}, {"hazards", hazards}};
    j["hand_centroid"] = f.hand_centroid ? point_json(*f.hand_centroid) : Json(nullptr);
    return j;
}

Json trace_to_json(std::span<const FrameObservation> trace) {
    Json arr = Json::array();
    for (const auto& f : trace) arr.push_back(to_json(f));
    return arr;
}

// =============================================================================
// Signals
// =============================================================================

bool is_active(const HazardObservation& h, const SignalConfig& cfg) {
    return h.confidence >= cfg.activity_confidence_threshold;
}

bool has_active_hazard(const FrameObservation& frame, const SignalConfig& cfg) {
    return std::any_of(frame.hazards.begin(), frame.hazards.end(),
                       [&](const HazardObservation& h) { return is_active(h, cfg); });
}

std::optional<double> hand_hazard_distance(const FrameObservation& frame, const SignalConfig& cfg) {
    if (!frame.hand_centroid) return std::nullopt;
    std::optional<double> best;
    for (const auto& h : frame.hazards) {
        if (!is_active(h, cfg)) continue;
        const double d = std::hypot(frame.hand_centroid->x - h.centroid.x,
                                    frame.hand_centroid->y - h.centroid.y);
        if (!best || d < *best) best = d;
    }
    return best;
}

double aggregate_area(const FrameObservation& frame, const SignalConfig& cfg) {
    double sum = 0.0;
    for (const auto& h : frame.hazards) {
        if (is_active(h, cfg)) sum += h.area_ratio;
    }
    return std::min(sum, 1.0);
}

std::vector<double> smooth_area(std::span<const FrameObservation> trace, const SignalConfig& cfg) {
    const auto w = static_cast<std::size_t>(std::max(cfg.smoothing_window, 1));
    std::vector<double> area;
    area.reserve(trace.size());
    for (const auto& f : trace) area.push_back(aggregate_area(f, cfg));

    std::vector<double> out(area.size());
    for (std::size_t i = 0; i < area.size(); ++i) {
        const std::size_t first = i + 1 >= w ? i + 1 - w : 0;
        double sum = 0.0;
        for (std::size_t k = first; k <= i; ++k) sum += area[k];
        out[i] = sum / static_cast<double>(i - first + 1);
    }
    return out;
}

std::vector<std::optional<double>> area_growth(std::span<const double> smoothed,
                                               std::span<const double> timestamps) {
    if (smoothed.size() != timestamps.size()) {
        throw InputError("area_growth: series and timestamps differ in length");
    }
    if (smoothed.empty()) throw InputError("area_growth: empty series");
    std::vector<std::optional<double>> out(smoothed.size());
    for (std::size_t i = 1; i < smoothed.size(); ++i) {
        const double dt = timestamps[i] - timestamps[i - 1];
        if (!(dt > 0.0)) {
            throw InputError(fmt::format("area_growth: timestamp {} does not increase", i));
        }
        out[i] = (smoothed[i] - smoothed[i - 1]) / dt;
    }
    return out;
}

std::vector<double> escalation_curve(std::span<const FrameObservation> trace,
                                     std::span<const std::optional<double>> distances,
                                     std::span<const double> smoothed, const SignalConfig& cfg) {
    if (distances.size() != trace.size() || smoothed.size() != trace.size()) {
        throw InputError("escalation_curve: series are not aligned with the trace");
    }
    std::vector<double> out(trace.size(), 0.0);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (!has_active_hazard(trace[i], cfg)) continue;
        const double proximity =
            distances[i] ? clamp01(1.0 - *distances[i] / cfg.proximity_scale) : 1.0;
        out[i] = clamp01(smoothed[i]) * proximity;
    }
    return out;
}

double safety_stat(std::span<const double> escalation, SafetyAggregator aggregator) {
    if (escalation.empty()) throw InputError("safety_stat: empty escalation series");
    if (aggregator == SafetyAggregator::Mean) {
        return clamp01(std::accumulate(escalation.begin(), escalation.end(), 0.0) /
                       static_cast<double>(escalation.size()));
    }
    return clamp01(*std::max_element(escalation.begin(), escalation.end()));
}

SignalSeries compute_signals(std::span<const FrameObservation> trace, const SignalConfig& cfg) {
    if (auto v = validate_signal_config(cfg); !v.empty()) throw ConfigError(v.front().message);
    if (trace.empty()) throw InputError("empty trace");
    if (auto v = validate_trace(trace); !v.empty()) {
        throw ValidationError("invalid trace: " + v.front().message, v);
    }
    SignalSeries s;
    s.distances.reserve(trace.size());
    std::vector<double> times;
    for (const auto& f : trace) {
        s.distances.push_back(hand_hazard_distance(f, cfg));
        times.push_back(f.timestamp);
    }
    s.smoothed_areas = smooth_area(trace, cfg);
    s.growth = area_growth(s.smoothed_areas, times);
    s.escalation = escalation_curve(trace, s.distances, s.smoothed_areas, cfg);
    s.safety_stat = safety_stat(s.escalation, cfg.aggregator);
    return s;
}

}  // namespace egoscript
