/// Acceptance checks: one PASS/FAIL line per primary criterion.
/// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "egoscript/domain/validation.h"
#include "egoscript/fusion/fusion.h"
#include "egoscript/pipeline/orchestrator.h"
#include "egoscript/report/report.h"
#include "egoscript/signals/signals.h"
#include "test_support.h"

using namespace egoscript;
using namespace egoscript::testing;
namespace fs = std::filesystem;
namespace vc = violation_code;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && pass) {
            pass = false;
            detail = what;
        }
    }
};

struct Criterion {
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

BackendClient stub_text(const std::string& url = "stub://") {
    BackendConfig c;
    c.kind = BackendKind::Text;
    c.endpoint_url = url;
    return BackendClient(c);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// =============================================================================
// Brute-force signal oracles
// =============================================================================

bool oracle_active(const HazardObservation& h) { return h.confidence >= 0.5; }

std::optional<double> oracle_distance(const FrameObservation& f) {
    if (!f.hand_centroid) return std::nullopt;
    std::optional<double> best;
    for (const auto& h : f.hazards) {
        if (!oracle_active(h)) continue;
        const double dx = f.hand_centroid->x - h.centroid.x;
        const double dy = f.hand_centroid->y - h.centroid.y;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (!best || d < *best) best = d;
    }
    return best;
}

double oracle_area(const FrameObservation& f) {
    double a = 0.0;
    for (const auto& h : f.hazards) {
        if (oracle_active(h)) a += h.area_ratio;
    }
    return std::min(a, 1.0);
}

std::vector<double> oracle_smooth(const Trace& t, int w) {
    std::vector<double> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const std::size_t lo = i + 1 >= static_cast<std::size_t>(w) ? i + 1 - w : 0;
        double sum = 0.0;
        for (std::size_t j = lo; j <= i; ++j) sum += oracle_area(t[j]);
        out.push_back(sum / static_cast<double>(i - lo + 1));
    }
    return out;
}

std::vector<std::optional<double>> oracle_growth(const std::vector<double>& a, const Trace& t) {
    std::vector<std::optional<double>> out{std::nullopt};
    for (std::size_t i = 1; i < a.size(); ++i) {
        out.push_back((a[i] - a[i - 1]) / (t[i].timestamp - t[i - 1].timestamp));
    }
    return out;
}

// =============================================================================
// Criteria
// =============================================================================

Outcome fusion_exactness() {
    Outcome o;
    const double full = overall_score(1, 1, 1, 1, 1, false);
    const double flagged = overall_score(1, 1, 1, 1, 1, true);
    o.require(std::fabs(full - 1.0) <= 1e-12, fmt::format("all-ones score {}", full));
    o.require(std::fabs(flagged - 0.75) <= 1e-12, fmt::format("flagged score {}", flagged));
    const double worked = overall_score(0.8, 0.9, 0.5, 0.55, 0.6, false);
    o.require(std::fabs(worked - 0.669) <= 1e-12, fmt::format("worked example {}", worked));
    if (o.pass) o.detail = fmt::format("S={} flagged={} worked={}", full, flagged, worked);
    return o;
}

Outcome weight_audit() {
    Outcome o;
    int bp = 0;
    for (int w : kWeightBasisPoints) bp += w;
    o.require(bp == 10000, fmt::format("basis points sum {}", bp));
    const FusionWeights w;
    const double sum = w.w_h + w.w_t + w.w_lat + w.w_sc + w.w_obs;
    o.require(std::fabs(sum - 1.0) <= 1e-12, fmt::format("weights sum {}", sum));
    try {
        audit_weights(w);
    } catch (const std::exception& e) {
        o.require(false, e.what());
    }
    FusionWeights bad;
    bad.w_obs = 0.08;
    bool rejected = false;
    try {
        audit_weights(bad);
    } catch (const ConfigError&) {
        rejected = true;
    }
    o.require(rejected, "a perturbed weight set passed the audit");
    if (o.pass) o.detail = fmt::format("sum={} bp={}", sum, bp);
    return o;
}

Outcome latency_identity() {
    Outcome o;
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> lo(-5.0, 3.0), width(0.0, 8.0), rho(0.5, 15.0), dt(-30.0, 40.0);
    const auto script = sample_script();
    VideoRecord record;
    record.id = "video-acceptance";
    record.status = VideoStatus::Rendered;
    record.alignment_score = 0.9;
    const JudgeVerdict verdict{0.5, 0.5, false, ""};
    int identity_checked = 0;
    for (int i = 0; i < 10000 && o.pass; ++i) {
        ToleranceWindow w;
        w.tau_lo = lo(rng);
        w.tau_hi = w.tau_lo + width(rng);
        w.rho_early = rho(rng);
        w.rho_late = rho(rng);
        FusionConfig cfg;
        cfg.windows.set(script.mode, w);

        VlmAnalysis analysis;
        analysis.intervention_urgency = 3;
        if (i % 10 != 0) analysis.events.push_back({script.expected_hazard_onset_s + dt(rng), EventType::HazardDetected, ""});
        const auto s = score_video({script, record, {}, analysis, verdict, "burn"}, cfg);
        o.require(s.e_lat == 1.0 - s.s_lat, fmt::format("identity broken at sample {}", i));
        o.require(s.s_lat == latency_score(s.delta_t_s, w), fmt::format("latency mismatch at sample {}", i));
        ++identity_checked;

        for (double eps : {1e-10, 1e-12}) {
            o.require(std::fabs(latency_score(w.tau_lo - eps, w) - 1.0) <= 1e-9, "discontinuous at tau_lo");
            o.require(std::fabs(latency_score(w.tau_hi + eps, w) - 1.0) <= 1e-9, "discontinuous at tau_hi");
        }
        o.require(latency_score(w.tau_lo, w) == 1.0 && latency_score(w.tau_hi, w) == 1.0,
                  "window edges do not score 1");

        if (i % 100 == 0) {
            std::vector<double> late, early;
            for (int k = 0; k < 200; ++k) {
                late.push_back(w.tau_hi + std::fabs(dt(rng)));
                early.push_back(w.tau_lo - std::fabs(dt(rng)));
            }
            std::sort(late.begin(), late.end());
            std::sort(early.begin(), early.end());
            for (std::size_t k = 1; k < late.size(); ++k) {
                o.require(latency_score(late[k], w) <= latency_score(late[k - 1], w), "late side increases");
                o.require(latency_score(early[k], w) >= latency_score(early[k - 1], w), "early side decreases");
            }
            std::uniform_real_distribution<double> inside(w.tau_lo, w.tau_hi);
            for (int k = 0; k < 50; ++k) o.require(latency_score(inside(rng), w) == 1.0, "in-window score below 1");
        }
    }
    if (o.pass) o.detail = fmt::format("{} samples", identity_checked);
    return o;
}

Outcome signal_oracles() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> frames(1, 50);
    long compared = 0;
    for (int trial = 0; trial < 1000 && o.pass; ++trial) {
        const auto trace = random_trace(rng, frames(rng), 4);
        for (const auto& f : trace) {
            const auto got = hand_hazard_distance(f, SignalConfig{});
            const auto want = oracle_distance(f);
            o.require(got.has_value() == want.has_value(), fmt::format("distance presence, trial {}", trial));
            if (got && want) o.require(std::fabs(*got - *want) <= 1e-12, fmt::format("distance, trial {}", trial));
            ++compared;
        }
        std::vector<double> times;
        for (const auto& f : trace) times.push_back(f.timestamp);
        for (int w : {1, 2, 3, 5}) {
            SignalConfig cfg;
            cfg.smoothing_window = w;
            const auto got = smooth_area(trace, cfg);
            const auto want = oracle_smooth(trace, w);
            o.require(got.size() == want.size(), "smoothing length");
            for (std::size_t i = 0; i < got.size() && i < want.size(); ++i) {
                o.require(std::fabs(got[i] - want[i]) <= 1e-12, fmt::format("smoothing w={}, trial {}", w, trial));
            }
            const auto g = area_growth(got, times);
            const auto gw = oracle_growth(want, trace);
            o.require(g.size() == gw.size(), "growth length");
            for (std::size_t i = 0; i < g.size() && i < gw.size(); ++i) {
                o.require(g[i].has_value() == gw[i].has_value(), "growth presence");
                if (g[i] && gw[i]) {
                    o.require(std::fabs(*g[i] - *gw[i]) <= 1e-12, fmt::format("growth w={}, trial {}", w, trial));
                }
            }
            compared += static_cast<long>(got.size() + g.size());
        }
    }
    if (o.pass) o.detail = fmt::format("1000 traces, {} values", compared);
    return o;
}

Outcome gate_boundary() {
    Outcome o;
    o.require(apply_gate(0.499999).status == GateStatus::Excluded, "0.499999 passed the gate");
    o.require(apply_gate(0.5).status == GateStatus::Valid, "0.5 was excluded");
    o.require(apply_gate(std::nextafter(0.5, 0.0)).status == GateStatus::Excluded, "just below 0.5 passed");
    o.require(apply_gate(std::nullopt).reason == "unrendered", "missing alignment not marked unrendered");
    if (o.pass) o.detail = "0.499999 excluded, 0.5 valid";
    return o;
}

Outcome fpr_criterion() {
    Outcome o;
    const auto q = fpr({1, 3});
    o.require(q.has_value() && *q == 0.25, "FP=1 TN=3 is not 0.25");
    o.require(!fpr({0, 0}).has_value(), "FP=0 TN=0 is applicable");
    const auto text = export_report(build_report({}), ExportFormat::Text);
    o.require(text.find("not applicable") != std::string::npos, "text report lacks 'not applicable'");
    if (o.pass) o.detail = "0.25 and not applicable";
    return o;
}

Outcome aggregation_fixture() {
    Outcome o;
    std::ifstream in(fixture_path("aggregation_60.json"));
    if (!in) {
        o.require(false, "fixture missing");
        return o;
    }
    const auto doc = Json::parse(in);
    std::vector<VideoScore> scores;
    for (const auto& j : doc["scores"]) {
        auto s = decode_video_score(j);
        o.require(s.ok(), "fixture score failed to decode");
        if (!s.ok()) return o;
        scores.push_back(std::move(s).value());
    }
    o.require(scores.size() == 60, "fixture is not 60 records");
    const auto rows = aggregate(scores);
    const auto& expected = doc["expected_rows"];
    o.require(rows.size() == 4 && expected.size() == 4, "row count");
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size() && i < expected.size(); ++i) {
        const auto& r = rows[i];
        const auto& e = expected[i];
        o.require(r.mode_label == e["mode_label"].get<std::string>(), "label mismatch");
        o.require(r.total == e["total"].get<int>() && r.valid == e["valid"].get<int>() &&
                      r.excluded == e["excluded"].get<int>(),
                  "count mismatch in " + r.mode_label);
        o.require(r.total == r.valid + r.excluded, "total != valid + excluded in " + r.mode_label);
        auto cmp = [&](const std::optional<double>& got, const char* key, double scale) {
            o.require(got.has_value(), std::string("missing ") + key);
            if (!got) return;
            const double diff = std::fabs(*got - e[key].get<double>()) / scale;
            worst = std::max(worst, diff);
            o.require(diff <= 1e-12, fmt::format("{} {} off by {}", r.mode_label, key, diff));
        };
        cmp(r.overall, "overall", 100.0);
        cmp(r.helpfulness, "helpfulness", 1.0);
        cmp(r.tone, "tone", 1.0);
        cmp(r.latency_err, "latency_err", 1.0);
        cmp(r.safety_crit, "safety_crit", 1.0);
    }
    if (o.pass) {
        o.detail = fmt::format("Reactive {} = {} + {}, max deviation {:.1e}", rows[0].total, rows[0].valid,
                               rows[0].excluded, worst);
    }
    return o;
}

Outcome pipeline_e2e() {
    Outcome o;
    TempDir a, b;
    auto text = stub_text();
    Orchestrator orch(text, PipelineConfig{});
    ArtifactStore sa(a.path()), sb(b.path());
    orch.run_pipeline(kitchen_scenario(), sa);
    orch.run_pipeline(kitchen_scenario(), sb);
    for (int s = 1; s <= 5; ++s) {
        o.require(fs::exists(sa.step_path(s)), fmt::format("missing {}", ArtifactStore::file_name(s)));
        o.require(slurp(sa.step_path(s)) == slurp(sb.step_path(s)),
                  fmt::format("{} differs between runs", ArtifactStore::file_name(s)));
    }
    const auto set = sa.artifact_set();
    o.require(validate_interventions(set.interventions, set).empty(), "interventions do not resolve");
    o.require(validate_user_actions(set.user_actions, set).empty(), "user actions do not resolve");
    o.require(validate_signals(set.signals, set).empty(), "signals do not resolve");
    o.require(validate_seeds(set.seeds, set).empty(), "seeds do not resolve");
    const auto scripts = sa.load_scripts();
    for (const auto& s : scripts) o.require(validate_script(s).ok(), "script fails validate_script");
    o.require(validate_scripts(scripts, set).empty(), "scripts do not resolve");
    std::set<AssistanceMode> modes;
    for (const auto& s : set.seeds) modes.insert(s.mode);
    o.require(set.seeds.size() == 3 && modes.size() == 3, "seeds do not cover the three modes");
    if (o.pass) {
        o.detail = fmt::format("{} interventions, {} seeds, {} scripts, byte-identical rerun",
                               set.interventions.size(), set.seeds.size(), scripts.size());
    }
    return o;
}

Outcome schema_retry() {
    Outcome o;
    {
        TempDir dir;
        auto text = stub_text("stub://?malformed=1");
        Orchestrator orch(text, PipelineConfig{});
        ArtifactStore store(dir.path());
        const auto summary = orch.run_pipeline(kitchen_scenario(), store);
        o.require(summary.retry_log.counts == std::array<int, 5>{1, 1, 1, 1, 1}, "retry log is not 1 per step");
        o.require(store.completed_steps() == 5, "pipeline did not complete");
    }
    {
        TempDir dir;
        auto text = stub_text("stub://?malformed=1");
        PipelineConfig cfg;
        cfg.schema_retry_limit = 0;
        Orchestrator orch(text, cfg);
        ArtifactStore store(dir.path());
        bool failed_at_1 = false;
        try {
            orch.run_pipeline(kitchen_scenario(), store);
        } catch (const StepFailure& e) {
            failed_at_1 = e.step() == 1 && e.raw_payloads().size() == 1;
        }
        o.require(failed_at_1, "retry limit 0 did not fail at step 1");
        o.require(fs::exists(dir.path() / "raw" / "step1_attempt0.txt"), "raw payload not retained");
    }
    if (o.pass) o.detail = "retry_log 1,1,1,1,1; limit 0 fails at step 1";
    return o;
}

Outcome mode_invariants() {
    Outcome o;
    std::mt19937_64 rng(77);
    auto text = stub_text();
    PipelineConfig cfg;
    cfg.k_interventions = 2;
    Orchestrator orch(text, cfg);
    int seeds_checked = 0;
    int mutations = 0;
    for (int trial = 0; trial < 20 && o.pass; ++trial) {
        TempDir dir;
        auto scenario = kitchen_scenario();
        scenario.id = fmt::format("scenario-{:03d}", trial);
        scenario.description += fmt::format(" Variant {}.", rng() % 100000);
        ArtifactStore store(dir.path());
        orch.run_pipeline(scenario, store);
        const auto set = store.artifact_set();
        for (const auto& seed : set.seeds) {
            ++seeds_checked;
            const bool has_utterance = seed.user_utterance && !seed.user_utterance->empty();
            if (seed.mode == AssistanceMode::ImplicitProactive) {
                o.require(!seed.user_utterance.has_value(), "implicit seed carries an utterance");
            } else {
                o.require(has_utterance, "reactive/explicit seed lacks an utterance");
            }
            o.require(validate_seed(seed, set).ok(), "generated seed fails validation");

            std::vector<std::pair<StructuredSeed, const char*>> mutated;
            auto m = seed;
            switch (seed.mode) {
                case AssistanceMode::Reactive:
                case AssistanceMode::ExplicitProactive:
                    m.user_utterance.reset();
                    mutated.emplace_back(m, vc::kModeUtteranceMismatch);
                    m = seed;
                    m.user_utterance = "";
                    mutated.emplace_back(m, vc::kModeUtteranceMismatch);
                    m = seed;
                    m.addressed_to_agent = !seed.addressed_to_agent;
                    mutated.emplace_back(m, vc::kModeUtteranceMismatch);
                    m = seed;
                    m.user_aware = false;
                    mutated.emplace_back(m, vc::kModeAwarenessMismatch);
                    break;
                case AssistanceMode::ImplicitProactive:
                    m.user_utterance = "Where did I leave the mitt?";
                    mutated.emplace_back(m, vc::kModeUtteranceMismatch);
                    m = seed;
                    m.addressed_to_agent = true;
                    mutated.emplace_back(m, vc::kModeUtteranceMismatch);
                    m = seed;
                    m.user_aware = true;
                    mutated.emplace_back(m, vc::kModeAwarenessMismatch);
                    break;
            }
            for (const auto& [bad, code] : mutated) {
                ++mutations;
                const auto r = validate_seed(bad, set);
                o.require(!r.ok() && has_violation(r.violations(), code),
                          fmt::format("{} mutation not rejected with {}", to_string(seed.mode), code));
            }
        }
    }
    if (o.pass) o.detail = fmt::format("{} seeds, {} mutations rejected", seeds_checked, mutations);
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"fusion exactness", 1.0, fusion_exactness},
        {"weight audit", 1.0, weight_audit},
        {"latency identity and shape", 5.0, latency_identity},
        {"signal oracles", 10.0, signal_oracles},
        {"gate boundary", 1.0, gate_boundary},
        {"FPR", 1.0, fpr_criterion},
        {"aggregation fixture", 1.0, aggregation_fixture},
        {"pipeline end-to-end", 30.0, pipeline_e2e},
        {"schema-retry behavior", 30.0, schema_retry},
        {"mode invariants", 30.0, mode_invariants},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.pass && elapsed > c.budget_s) {
            o.pass = false;
            o.detail = fmt::format("over the {} s budget", c.budget_s);
        }
        if (!o.pass) ++failures;
        std::cout << fmt::format("{} [PRIMARY] {} ({:.3f} s): {}\n", o.pass ? "PASS" : "FAIL", c.name, elapsed,
                                 o.detail);
    }
    std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
