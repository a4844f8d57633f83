#include <doctest.h>

#include <random>

#include "egoscript/semantic/semantic.h"
#include "test_support.h"

using namespace egoscript;
using namespace egoscript::testing;
namespace vc = violation_code;

namespace {

Json vlm_payload() {
    return Json::parse(R"({
        "identified_hazard": "hot pan handle",
        "proposed_intervention": "Use a mitt before grabbing the pan.",
        "intervention_urgency": 3,
        "events": [
            {"timestamp_s": 8.0, "event_type": "signal_detected", "description": "steam rising"},
            {"timestamp_s": 9.0, "event_type": "hazard_detected", "description": "hand near handle"}
        ]
    })");
}

Json judge_payload() {
    return Json::parse(R"({"helpfulness_score": 0.8, "tone_score": 0.9, "over_alert_flag": false,
                           "reasoning": "Timely and concise."})");
}

bool names_field(const Violations& v, const std::string& field) {
    for (const auto& x : v) {
        if (x.path.find(field) != std::string::npos || x.message.find(field) != std::string::npos) return true;
    }
    return false;
}

VlmAnalysis with_events(std::vector<VlmEvent> events) {
    VlmAnalysis a;
    a.events = std::move(events);
    return a;
}

}  // namespace

// =============================================================================
// VLM output
// =============================================================================

TEST_CASE("valid VLM payload parses") {
    auto r = parse_vlm_output(vlm_payload().dump(), 12.0);
    REQUIRE(r.ok());
    CHECK(r.value().intervention_urgency == 3);
    CHECK(r.value().events.size() == 2);
    CHECK(r.value().events[0].event_type == EventType::SignalDetected);
}

TEST_CASE("fenced payloads are accepted") {
    CHECK(parse_vlm_output("```json\n" + vlm_payload().dump() + "\n```", 12.0).ok());
}

TEST_CASE("urgency must be an integer in 1..5") {
    auto j = vlm_payload();
    j["intervention_urgency"] = 6;
    auto r = parse_vlm_output(j.dump(), 12.0);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations()[0].code == vc::kUrgencyRange);

    j["intervention_urgency"] = 2.5;
    CHECK(has_violation(parse_vlm_output(j.dump(), 12.0).violations(), vc::kUrgencyRange));
    j["intervention_urgency"] = 0;
    CHECK(has_violation(parse_vlm_output(j.dump(), 12.0).violations(), vc::kUrgencyRange));

    j["intervention_urgency"] = 3.0;
    auto ok = parse_vlm_output(j.dump(), 12.0);
    REQUIRE(ok.ok());
    CHECK(ok.value().intervention_urgency == 3);
}

TEST_CASE("event beyond the video duration is rejected") {
    auto j = vlm_payload();
    j["events"][1]["timestamp_s"] = 99.0;
    auto r = parse_vlm_output(j.dump(), 12.0);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations()[0].code == vc::kEventBeyondDuration);
    CHECK(r.violations()[0].path == "events[1].timestamp_s");
}

TEST_CASE("unknown event type is rejected") {
    auto j = vlm_payload();
    j["events"][0]["event_type"] = "explosion";
    CHECK(has_violation(parse_vlm_output(j.dump(), 12.0).violations(), vc::kUnknownEnum));
}

TEST_CASE("malformed text is a malformed payload") {
    auto r = parse_vlm_output("not json at all", 12.0);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations()[0].code == vc::kMalformedPayload);
}

TEST_CASE("random field deletions are always named") {
    std::mt19937_64 rng(5);
    const std::vector<std::string> vlm_fields{"identified_hazard", "proposed_intervention", "intervention_urgency",
                                              "events"};
    const std::vector<std::string> event_fields{"timestamp_s", "event_type", "description"};
    const std::vector<std::string> judge_fields{"helpfulness_score", "tone_score", "over_alert_flag", "reasoning"};
    for (int trial = 0; trial < 500; ++trial) {
        auto j = vlm_payload();
        std::string deleted;
        if (trial % 2 == 0) {
            deleted = vlm_fields[rng() % vlm_fields.size()];
            j.erase(deleted);
        } else {
            deleted = event_fields[rng() % event_fields.size()];
            j["events"][rng() % 2].erase(deleted);
        }
        auto r = parse_vlm_output(j.dump(), 12.0);
        REQUIRE_FALSE(r.ok());
        CHECK(names_field(r.violations(), deleted));

        auto k = judge_payload();
        const auto jd = judge_fields[rng() % judge_fields.size()];
        k.erase(jd);
        auto jr = parse_judge_output(k.dump());
        REQUIRE_FALSE(jr.ok());
        CHECK(names_field(jr.violations(), jd));
    }
}

// =============================================================================
// Judge output
// =============================================================================

TEST_CASE("judge verdict parses") {
    auto r = parse_judge_output(judge_payload().dump());
    REQUIRE(r.ok());
    CHECK(r.value().helpfulness_score == 0.8);
    CHECK(r.value().tone_score == 0.9);
    CHECK_FALSE(r.value().over_alert_flag);
}

TEST_CASE("judge score out of range is rejected") {
    auto j = judge_payload();
    j["helpfulness_score"] = 1.2;
    auto r = parse_judge_output(j.dump());
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations()[0].code == vc::kScoreRange);
}

TEST_CASE("missing over_alert_flag is rejected") {
    auto j = judge_payload();
    j.erase("over_alert_flag");
    auto r = parse_judge_output(j.dump());
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations()[0].code == vc::kMissingField);
    CHECK(r.violations()[0].path == "over_alert_flag");
}

// =============================================================================
// Judge input and detection time
// =============================================================================

TEST_CASE("judge input with evidence carries both cue sentences") {
    const auto script = sample_script();
    const auto analysis = parse_vlm_output(vlm_payload().dump(), 12.0).value();
    const auto in = build_judge_input(script, analysis, EvidenceCues{0.62, 0.04});
    REQUIRE(in.evidence_summary.has_value());
    CHECK(in.evidence_summary->find("0.620") != std::string::npos);
    CHECK(in.evidence_summary->find("0.040") != std::string::npos);
    CHECK(in.vlm_outputs == analysis);
    CHECK(in.script_context.actions.size() == 2);
    CHECK(in.script_context.hazard_expectation.find("8.5") != std::string::npos);
}

TEST_CASE("judge input without evidence omits the summary") {
    const auto analysis = parse_vlm_output(vlm_payload().dump(), 12.0).value();
    const auto in = build_judge_input(sample_script(), analysis, std::nullopt);
    CHECK_FALSE(in.evidence_summary.has_value());
    CHECK_FALSE(to_json(in).contains("evidence_summary"));
}

TEST_CASE("judge input assembly is deterministic") {
    const auto analysis = parse_vlm_output(vlm_payload().dump(), 12.0).value();
    const auto a = to_json(build_judge_input(sample_script(), analysis, EvidenceCues{0.5, std::nullopt})).dump();
    const auto b = to_json(build_judge_input(sample_script(), analysis, EvidenceCues{0.5, std::nullopt})).dump();
    CHECK(a == b);
    CHECK(judge_prompt(build_judge_input(sample_script(), analysis, std::nullopt)).find("over_alert_flag") !=
          std::string::npos);
}

TEST_CASE("detection time examples") {
    CHECK(detection_time(with_events({{6.0, EventType::HazardDetected, ""}, {4.0, EventType::SignalDetected, ""}})) ==
          4.0);
    CHECK_FALSE(detection_time(with_events({{2.0, EventType::UserAction, ""}})).has_value());
    CHECK(detection_time(with_events({{8.5, EventType::HazardDetected, ""}})) == 8.5);
}

TEST_CASE("adding an event never raises the detection time") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ts(0.0, 12.0);
    for (int trial = 0; trial < 500; ++trial) {
        VlmAnalysis a;
        for (int i = 0; i < static_cast<int>(rng() % 5); ++i) {
            a.events.push_back({ts(rng), static_cast<EventType>(rng() % 4), ""});
        }
        const auto before = detection_time(a);
        a.events.push_back({ts(rng), static_cast<EventType>(rng() % 4), ""});
        const auto after = detection_time(a);
        if (before) {
            REQUIRE(after.has_value());
            CHECK(*after <= *before);
        }
    }
}
