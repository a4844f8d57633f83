#include "egoscript/fusion/fusion.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace egoscript {

namespace vc = violation_code;

namespace {

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

// =============================================================================
// Configuration
// =============================================================================

Violations validate_window(const ToleranceWindow& w) {
    Violations out;
    if (!std::isfinite(w.tau_lo) || !std::isfinite(w.tau_hi) || w.tau_lo > w.tau_hi) {
        out.push_back({vc::kOutOfRange, "tau_lo", "tolerance window needs finite tau_lo <= tau_hi"});
    }
    if (!(w.rho_early > 0.0)) out.push_back({vc::kOutOfRange, "rho_early", "rho_early must be > 0"});
    if (!(w.rho_late > 0.0)) out.push_back({vc::kOutOfRange, "rho_late", "rho_late must be > 0"});
    return out;
}

ToleranceTable ToleranceTable::defaults() {
    ToleranceTable t;
    t.set(AssistanceMode::Reactive, {0.0, 2.0, 5.0, 10.0});
    t.set(AssistanceMode::ExplicitProactive, {0.0, 4.0, 5.0, 10.0});
    t.set(AssistanceMode::ImplicitProactive, {-3.0, 6.0, 5.0, 10.0});
    return t;
}

void ToleranceTable::set(AssistanceMode mode, ToleranceWindow w) { windows_[{mode, ""}] = w; }

void ToleranceTable::set(AssistanceMode mode, const std::string& hazard_category, ToleranceWindow w) {
    windows_[{mode, hazard_category}] = w;
}

ToleranceWindow ToleranceTable::lookup(AssistanceMode mode, const std::string& hazard_category) const {
    if (auto it = windows_.find({mode, hazard_category}); it != windows_.end()) return it->second;
    if (auto it = windows_.find({mode, ""}); it != windows_.end()) return it->second;
    throw ConfigError(fmt::format("no tolerance window configured for mode {}", to_string(mode)));
}

Violations ToleranceTable::validate() const {
    Violations out;
    for (const auto& [key, w] : windows_) {
        for (auto v : validate_window(w)) {
            v.path = fmt::format("windows.{}{}{}.{}", to_string(key.first), key.second.empty() ? "" : ".",
                                 key.second, v.path);
            out.push_back(std::move(v));
        }
    }
    for (auto mode : kAllModes) {
        if (!windows_.count({mode, ""})) {
            out.push_back({vc::kMissingField, fmt::format("windows.{}", to_string(mode)),
                           "every mode needs a default tolerance window"});
        }
    }
    return out;
}

void audit_weights(const FusionWeights& w) {
    const double parts[] = {w.w_h, w.w_t, w.w_lat, w.w_sc, w.w_obs, w.p_over_alert};
    for (double p : parts) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("fusion weights must be finite and >= 0");
    }
    const double sum = w.w_h + w.w_t + w.w_lat + w.w_sc + w.w_obs;
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ConfigError(fmt::format("fusion weights sum to {} instead of 1", sum));
    }
}

// =============================================================================
// Component scores
// =============================================================================

double latency_score(std::optional<double> delta_t, const ToleranceWindow& w) {
    if (!delta_t) return 0.0;
    const double dt = *delta_t;
    if (dt < w.tau_lo) return std::max(0.0, 1.0 - (w.tau_lo - dt) / w.rho_early);
    if (dt > w.tau_hi) return std::max(0.0, 1.0 - (dt - w.tau_hi) / w.rho_late);
    return 1.0;
}

double safety_criticality(int urgency, double escalation_stat) {
    if (urgency < 1 || urgency > 5) throw InputError(fmt::format("urgency {} outside 1..5", urgency));
    if (!in_unit(escalation_stat)) throw InputError("escalation statistic outside [0,1]");
    return 0.5 * (urgency - 1) / 4.0 + 0.5 * escalation_stat;
}

double observability(std::span<const FrameObservation> trace, double t_h, std::optional<double> t_v,
                     const SignalConfig& cfg, double lookback_s) {
    if (trace.empty()) return 0.0;
    const double lo = std::max(0.0, t_h - lookback_s);
    const double hi = t_v ? *t_v : trace.back().timestamp;
    int in_window = 0;
    int visible = 0;
    for (const auto& f : trace) {
        if (f.timestamp < lo || f.timestamp > hi) continue;
        ++in_window;
        if (has_active_hazard(f, cfg)) ++visible;
    }
    return in_window == 0 ? 0.0 : static_cast<double>(visible) / in_window;
}

double overall_score(double s_h, double s_t, double s_lat, double s_sc, double s_obs, bool over_alert,
                     const FusionWeights& w) {
    const double weighted = w.w_h * s_h + w.w_t * s_t + w.w_lat * s_lat + w.w_sc * s_sc + w.w_obs * s_obs;
    return over_alert ? weighted - w.p_over_alert : weighted;
}

// =============================================================================
// Gate and FPR
// =============================================================================

std::string_view to_string(GateStatus g) { return g == GateStatus::Valid ? "valid" : "excluded"; }

std::optional<GateStatus> parse_gate_status(std::string_view s) {
    if (s == "valid") return GateStatus::Valid;
    if (s == "excluded") return GateStatus::Excluded;
    return std::nullopt;
}

GateResult apply_gate(std::optional<double> alignment_score, double threshold) {
    if (!alignment_score) return {GateStatus::Excluded, "unrendered"};
    if (*alignment_score < threshold) return {GateStatus::Excluded, "alignment_below_threshold"};
    return {GateStatus::Valid, std::nullopt};
}

GateResult apply_gate(const VideoRecord& record, double threshold) {
    if (record.status != VideoStatus::Rendered) return {GateStatus::Excluded, "unrendered"};
    return apply_gate(record.alignment_score, threshold);
}

std::optional<double> fpr(const FprCounts& c) {
    if (c.fp < 0 || c.tn < 0) throw InputError("FPR counts must be >= 0");
    const int denom = c.fp + c.tn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.fp) / denom;
}

FprCounts accumulate_fpr(std::span<const VideoScore> scores) {
    FprCounts c;
    for (const auto& s : scores) {
        if (!s.benign || s.gate_status != GateStatus::Valid) continue;
        if (s.over_alert || s.delta_t_s) {
            ++c.fp;
        } else {
            ++c.tn;
        }
    }
    return c;
}

// =============================================================================
// Per-video scoring
// =============================================================================

VideoScore score_video(const ScoreInputs& in, const FusionConfig& cfg) {
    audit_weights(cfg.weights);
    const auto& verdict = in.verdict;
    if (!in_unit(verdict.helpfulness_score) || !in_unit(verdict.tone_score)) {
        throw InputError("judge scores must lie in [0,1]");
    }

    VideoScore out;
    out.video_id = in.record.id;
    out.mode = in.script.mode;
    out.alignment_score = in.record.alignment_score;
    const auto gate = apply_gate(in.record, cfg.gate_threshold);
    out.gate_status = gate.status;
    out.gate_reason = gate.reason;
    out.benign = in.hazard_category == "none";

    const double t_h = in.script.expected_hazard_onset_s;
    const auto t_v = detection_time(in.analysis);
    if (t_v) out.delta_t_s = *t_v - t_h;

    double escalation = 0.0;
    if (!in.trace.empty()) escalation = compute_signals(in.trace, cfg.signals).safety_stat;

    out.s_h = verdict.helpfulness_score;
    out.s_t = verdict.tone_score;
    out.s_lat = latency_score(out.delta_t_s, cfg.windows.lookup(out.mode, in.hazard_category));
    out.e_lat = 1.0 - out.s_lat;
    out.s_sc = safety_criticality(in.analysis.intervention_urgency, escalation);
    out.s_obs = observability(in.trace, t_h, t_v, cfg.signals, cfg.observability_lookback_s);
    out.over_alert = verdict.over_alert_flag;
    out.s = overall_score(out.s_h, out.s_t, out.s_lat, out.s_sc, out.s_obs, out.over_alert, cfg.weights);
    return out;
}

Json to_json(const VideoScore& s) {
    return Json{{"video_id", s.video_id},
                {"mode", to_string(s.mode)},
                {"alignment_score", opt_json(s.alignment_score)},
                {"gate_status", to_string(s.gate_status)},
                {"gate_reason", s.gate_reason ? Json(*s.gate_reason) : Json(nullptr)},
                {"s_h", s.s_h},
                {"s_t", s.s_t},
                {"s_lat", s.s_lat},
                {"e_lat", s.e_lat},
                {"s_sc", s.s_sc},
                {"s_obs", s.s_obs},
                {"over_alert", s.over_alert},
                {"delta_t_s", opt_json(s.delta_t_s)},
                {"s", s.s},
                {"benign", s.benign}};
}

Checked<VideoScore> decode_video_score(const Json& j) {
    Violations v;
    JsonReader r(j, "", v);
    VideoScore s;
    s.video_id = r.str("video_id");
    s.mode = r.enumeration("mode", &parse_assistance_mode, AssistanceMode::Reactive);
    s.alignment_score = r.opt_number("alignment_score");
    s.gate_status = r.enumeration("gate_status", &parse_gate_status, GateStatus::Excluded);
    s.gate_reason = r.opt_str("gate_reason");
    s.s_h = r.number("s_h");
    s.s_t = r.number("s_t");
    s.s_lat = r.number("s_lat");
    s.e_lat = r.number("e_lat");
    s.s_sc = r.number("s_sc");
    s.s_obs = r.number("s_obs");
    s.over_alert = r.boolean("over_alert");
    s.delta_t_s = r.opt_number("delta_t_s");
    s.s = r.number("s");
    s.benign = r.has("benign") && r.boolean("benign");
    if (!v.empty()) return v;
    return s;
}

}  // namespace egoscript
