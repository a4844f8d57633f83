#include <doctest.h>

#include "egoscript/project/project.h"
#include "egoscript/service/service.h"
#include "test_support.h"

using namespace egoscript;
using namespace egoscript::testing;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    TempDir dir;
    std::string id = Project::create(dir.path(), kitchen_scenario());
    Project project{dir.path() / id, ProjectConfig{}};
};

std::string first_seed(const Project& p) { return p.step_artifact(4)["seeds"][0]["id"].get<std::string>(); }

const char* kVlm = R"({"identified_hazard": "hot pan", "proposed_intervention": "Use a mitt.",
    "intervention_urgency": 3, "events": [{"timestamp_s": 8.0, "event_type": "hazard_detected",
    "description": "pan"}]})";
const char* kJudge = R"({"helpfulness_score": 0.8, "tone_score": 0.9, "over_alert_flag": false,
    "reasoning": "ok"})";

VideoRecord fixture_record(double alignment) {
    VideoRecord r;
    r.id = "video-fixture";
    r.script_ref = "seed-000000000001";
    r.video_ref = "vid-fixture";
    r.status = VideoStatus::Rendered;
    r.duration_s = 12.0;
    r.alignment_score = alignment;
    return r;
}

}  // namespace

// =============================================================================
// Creation and pipeline
// =============================================================================

TEST_CASE("project ids are content derived") {
    TempDir dir;
    const auto a = Project::create(dir.path(), kitchen_scenario());
    CHECK(a == Project::create(dir.path(), kitchen_scenario()));
    CHECK(a != Project::create(dir.path(), benign_scenario()));
    CHECK(Project::exists(dir.path(), a));
    CHECK_FALSE(Project::exists(dir.path(), "../etc"));
    CHECK_FALSE(Project::exists(dir.path(), "proj-missing"));
}

TEST_CASE("invalid scenarios are rejected") {
    TempDir dir;
    auto s = kitchen_scenario();
    s.id.clear();
    CHECK_THROWS_AS(Project::create(dir.path(), s), ValidationError);
}

TEST_CASE("full pipeline makes every artifact retrievable") {
    Fixture f;
    f.project.run_pipeline();
    for (int step = 1; step <= 5; ++step) CHECK_NOTHROW(f.project.step_artifact(step));
    CHECK(f.project.step_artifact(5)["scripts"].size() == 3);
}

TEST_CASE("unrun steps are not found and out-of-order steps conflict") {
    Fixture f;
    CHECK_THROWS_AS(f.project.step_artifact(1), NotFoundError);
    CHECK_THROWS_AS(f.project.run_step(3), OrderError);
    CHECK_THROWS_AS(f.project.run_step(9), InputError);
    f.project.run_step(1);
    CHECK_NOTHROW(f.project.step_artifact(1));
    CHECK_THROWS_AS(f.project.step_artifact(2), NotFoundError);
}

// =============================================================================
// Artifact replacement
// =============================================================================

TEST_CASE("replacing step 2 with a dangling reference is rejected") {
    Fixture f;
    f.project.run_pipeline();
    auto body = f.project.step_artifact(2);
    body["user_actions"][0]["intervention_id"] = "int-doesnotexist";
    try {
        f.project.replace_step(2, body);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(has_violation(e.violations(), violation_code::kDanglingReference));
        CHECK(http_status_for(e) == 422);
    }
    CHECK(f.project.store().completed_steps() == 5);
}

TEST_CASE("valid replacement removes downstream steps") {
    Fixture f;
    f.project.run_pipeline();
    auto body = f.project.step_artifact(2);
    body["user_actions"][0]["description"] = "The user grabs the pan with a wet towel.";
    f.project.replace_step(2, body);
    CHECK(f.project.step_artifact(2)["user_actions"][0]["description"] ==
          "The user grabs the pan with a wet towel.");
    CHECK(f.project.store().completed_steps() == 2);
    f.project.run_step(3);
    CHECK(f.project.store().completed_steps() == 3);
}

TEST_CASE("replacing a step ahead of its inputs conflicts") {
    Fixture f;
    try {
        f.project.replace_step(3, Json{{"signals", Json::array()}});
        FAIL("expected an order error");
    } catch (const OrderError& e) {
        CHECK(http_status_for(e) == 409);
    }
}

TEST_CASE("step 1 replacement must keep the scenario id") {
    Fixture f;
    f.project.run_step(1);
    auto body = f.project.step_artifact(1);
    body["scenario_id"] = "other";
    CHECK_THROWS_AS(f.project.replace_step(1, body), ValidationError);
}

TEST_CASE("step 5 accepts a yaml body") {
    Fixture f;
    f.project.run_pipeline();
    const auto yaml = f.project.store().read_step(5);
    f.project.replace_step(5, Json{{"yaml", yaml}});
    CHECK(f.project.store().read_step(5) == yaml);
    CHECK_THROWS_AS(f.project.replace_step(5, Json{{"yaml", "scripts: [{mode: sideways}]"}}), ValidationError);
}

// =============================================================================
// Generation and evaluation
// =============================================================================

TEST_CASE("generate requires scripts") {
    Fixture f;
    CHECK_THROWS_AS(f.project.generate("seed-x"), OrderError);
    f.project.run_pipeline();
    CHECK_THROWS_AS(f.project.generate("seed-missing"), NotFoundError);
}

TEST_CASE("generate then evaluate writes an analysis file") {
    Fixture f;
    f.project.run_pipeline();
    const auto rec = f.project.generate(first_seed(f.project));
    REQUIRE(rec.status == VideoStatus::Rendered);
    const auto score = f.project.evaluate(rec.id);
    CHECK(score.video_id == rec.id);
    CHECK(score.gate_status == GateStatus::Valid);
    CHECK(fs::exists(f.project.root() / "analysis" / (rec.id + ".json")));
    REQUIRE(f.project.scores().size() == 1);
    CHECK(f.project.scores()[0] == score);

    const auto report = f.project.report();
    CHECK(report.rows[3].total == 1);
    CHECK(f.project.write_reports(report).size() == 3);
    CHECK(fs::exists(f.project.root() / "reports" / "report.txt"));
}

TEST_CASE("evaluation with a trace is deterministic") {
    Fixture f;
    f.project.run_pipeline();
    const auto rec = f.project.generate(first_seed(f.project));
    std::mt19937_64 rng(11);
    const auto trace = random_trace(rng, 30, 2);
    const auto a = f.project.evaluate(rec.id, trace);
    const auto b = f.project.evaluate(rec.id, trace);
    CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("evaluating a missing video is not found") {
    Fixture f;
    CHECK_THROWS_AS(f.project.evaluate("video-none"), NotFoundError);
}

TEST_CASE("report on an empty project has zero totals") {
    Fixture f;
    for (const auto& row : f.project.report().rows) CHECK(row.total == 0);
}

// =============================================================================
// Fixture scoring
// =============================================================================

TEST_CASE("fixture evaluation scores offline") {
    const auto script = sample_script(AssistanceMode::ImplicitProactive);
    const auto s = evaluate_from_fixtures(script, fixture_record(0.9), {}, kVlm, kJudge, "burn");
    CHECK(s.delta_t_s == doctest::Approx(-0.5));
    CHECK(s.s_lat == 1.0);
    CHECK(s.s_sc == doctest::Approx(0.25));
    CHECK(s.s == doctest::Approx(0.32 + 0.072 + 0.25 + 0.05));
}

TEST_CASE("fixture evaluation rejects schema violations") {
    const auto script = sample_script();
    CHECK_THROWS_AS(evaluate_from_fixtures(script, fixture_record(0.9), {}, "{}", kJudge, "burn"), ValidationError);
    CHECK_THROWS_AS(evaluate_from_fixtures(script, fixture_record(0.9), {}, kVlm, "{\"tone_score\": 2}", "burn"),
                    ValidationError);
}

TEST_CASE("low alignment fixture is excluded but scored") {
    const auto s = evaluate_from_fixtures(sample_script(), fixture_record(0.3), {}, kVlm, kJudge, "burn");
    CHECK(s.gate_status == GateStatus::Excluded);
    CHECK(s.s > 0.0);
}

// =============================================================================
// Configuration
// =============================================================================

TEST_CASE("config yaml overrides defaults") {
    const auto cfg = load_config_text(R"(
pipeline:
  k_interventions: 2
fusion:
  windows:
    reactive: {tau_lo: 0, tau_hi: 3}
  hazard_windows:
    - {mode: reactive, hazard_category: burn, tau_lo: 0, tau_hi: 1}
synthesis:
  max_polls: 5
)");
    CHECK(cfg.pipeline.k_interventions == 2);
    CHECK(cfg.fusion.windows.lookup(AssistanceMode::Reactive).tau_hi == 3.0);
    CHECK(cfg.fusion.windows.lookup(AssistanceMode::Reactive, "burn").tau_hi == 1.0);
    CHECK(cfg.synthesis.max_polls == 5);
    CHECK_FALSE(cfg.pipeline.bind_all_chains);
    CHECK(load_config_text("pipeline:\n  bind_all_chains: true\n").pipeline.bind_all_chains);
    CHECK_THROWS_AS(load_config_text("pipeline:\n  bind_all_chains: 3\n"), ConfigError);
}

TEST_CASE("config rejects weights that do not sum to one") {
    CHECK_THROWS_AS(load_config_text("fusion:\n  weights: {w_h: 0.5}\n"), ConfigError);
    CHECK_THROWS_AS(load_config_text("signals:\n  aggregator: median\n"), ConfigError);
    CHECK_THROWS_AS(load_config_text("backends:\n  text: {timeout_s: -1}\n"), ConfigError);
}

TEST_CASE("project construction audits weights") {
    TempDir dir;
    ProjectConfig cfg;
    cfg.fusion.weights.w_h = 0.9;
    CHECK_THROWS_AS(Project(dir.path(), cfg), ConfigError);
}
