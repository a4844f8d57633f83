#include <doctest.h>

#include <cmath>
#include <random>

#include "egoscript/signals/signals.h"
#include "test_support.h"

using namespace egoscript;
using namespace egoscript::testing;

namespace {

FrameObservation frame(int i, double t, std::optional<Point2> hand, std::vector<HazardObservation> hz = {}) {
    return {i, t, hand, std::move(hz)};
}

HazardObservation hazard(double conf, double area, Point2 c) { return {"pan", conf, area, c}; }

/// One frame per area value, each with a single active hazard of that area.
Trace area_trace(const std::vector<double>& areas, double dt = 1.0) {
    Trace t;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        t.push_back(frame(static_cast<int>(i), static_cast<double>(i) * dt, std::nullopt,
                          {hazard(0.9, areas[i], {0.5, 0.5})}));
    }
    return t;
}

SignalConfig window(int w) {
    SignalConfig c;
    c.smoothing_window = w;
    return c;
}

}  // namespace

// =============================================================================
// Distance
// =============================================================================

TEST_CASE("coincident hand and hazard give zero distance") {
    const auto f = frame(0, 0.0, Point2{0.5, 0.5}, {hazard(0.9, 0.1, {0.5, 0.5})});
    CHECK(hand_hazard_distance(f, SignalConfig{}) == 0.0);
}

TEST_CASE("distance is the minimum over active hazards") {
    auto f = frame(0, 0.0, Point2{0.6, 0.8}, {hazard(0.9, 0.1, {0.3, 0.4}), hazard(0.9, 0.1, {0.0, 0.0})});
    CHECK(*hand_hazard_distance(f, SignalConfig{}) == doctest::Approx(0.5).epsilon(1e-15));
    f.hazards[1].confidence = 0.3;
    CHECK(*hand_hazard_distance(f, SignalConfig{}) == doctest::Approx(0.5).epsilon(1e-15));
    f.hazards[0].confidence = 0.3;
    CHECK_FALSE(hand_hazard_distance(f, SignalConfig{}).has_value());
}

TEST_CASE("untracked hand gives no distance") {
    const auto f = frame(0, 0.0, std::nullopt, {hazard(0.9, 0.1, {0.5, 0.5})});
    CHECK_FALSE(hand_hazard_distance(f, SignalConfig{}).has_value());
}

// =============================================================================
// Smoothing and growth
// =============================================================================

TEST_CASE("truncated-window smoothing") {
    const auto s = smooth_area(area_trace({0.1, 0.2, 0.3}), window(3));
    REQUIRE(s.size() == 3);
    CHECK(s[0] == doctest::Approx(0.1));
    CHECK(s[1] == doctest::Approx(0.15));
    CHECK(s[2] == doctest::Approx(0.2));
}

TEST_CASE("constant area is a smoothing fixed point and w=1 is identity") {
    for (double v : smooth_area(area_trace({0.25, 0.25, 0.25, 0.25}), window(3))) CHECK(v == 0.25);
    const std::vector<double> a{0.1, 0.7, 0.2, 0.4};
    CHECK(smooth_area(area_trace(a), window(1)) == a);
}

TEST_CASE("aggregate area sums active hazards and clamps at 1") {
    const auto f = frame(0, 0.0, std::nullopt,
                         {hazard(0.9, 0.6, {0, 0}), hazard(0.9, 0.7, {0, 0}), hazard(0.1, 0.5, {0, 0})});
    CHECK(aggregate_area(f, SignalConfig{}) == 1.0);
}

TEST_CASE("a single spike moves the smoothed area by at most h/w") {
    std::vector<double> a(10, 0.2);
    a[5] = 0.2 + 0.5;
    const auto s = smooth_area(area_trace(a), window(3));
    for (double v : s) CHECK(std::abs(v - 0.2) <= 0.5 / 3 + 1e-15);
}

TEST_CASE("growth examples") {
    const std::vector<double> t1{0.0, 1.0};
    const std::vector<double> a1{0.2, 0.3};
    auto g = area_growth(a1, t1);
    CHECK_FALSE(g[0].has_value());
    CHECK(*g[1] == doctest::Approx(0.1));

    const std::vector<double> t2{0.0, 0.5};
    const std::vector<double> a2{0.1, 0.15};
    CHECK(*area_growth(a2, t2)[1] == doctest::Approx(0.1));

    const std::vector<double> a3{0.3, 0.3};
    CHECK(*area_growth(a3, t1)[1] == 0.0);
}

TEST_CASE("growth is antisymmetric under reversal") {
    const std::vector<double> a{0.2, 0.45};
    const std::vector<double> ra{0.45, 0.2};
    const std::vector<double> t{0.0, 0.8};
    CHECK(*area_growth(a, t)[1] == -*area_growth(ra, t)[1]);
}

TEST_CASE("growth rejects bad input") {
    const std::vector<double> a{0.1, 0.2};
    const std::vector<double> flat{1.0, 1.0};
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(area_growth(a, flat), InputError);
    CHECK_THROWS_AS(area_growth(a, one), InputError);
    CHECK_THROWS_AS(area_growth(std::vector<double>{}, std::vector<double>{}), InputError);
}

// =============================================================================
// Escalation
// =============================================================================

TEST_CASE("escalation examples") {
    const SignalConfig cfg;
    Trace t{frame(0, 0.0, std::nullopt), frame(1, 1.0, Point2{0.5, 0.5}, {hazard(0.9, 0.4, {0.5, 0.5})}),
            frame(2, 2.0, Point2{0.5, 0.75}, {hazard(0.9, 0.4, {0.5, 0.5})})};
    const std::vector<std::optional<double>> d{std::nullopt, 0.0, 0.25};
    const std::vector<double> smoothed{0.0, 0.4, 0.4};
    const auto e = escalation_curve(t, d, smoothed, cfg);
    CHECK(e[0] == 0.0);
    CHECK(e[1] == doctest::Approx(0.4));
    CHECK(e[2] == doctest::Approx(0.0));
}

TEST_CASE("safety statistic") {
    const std::vector<double> e{0.0, 0.2, 0.7, 0.4};
    CHECK(safety_stat(e) == 0.7);
    CHECK(safety_stat(std::vector<double>{0, 0}) == 0.0);
    CHECK(safety_stat(std::vector<double>{0.5}) == 0.5);
    CHECK(safety_stat(e, SafetyAggregator::Mean) == doctest::Approx(0.325));
    CHECK_THROWS_AS(safety_stat(std::vector<double>{}), InputError);
}

TEST_CASE("escalation and safety stay in [0,1] on random traces") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto t = random_trace(rng, 1 + trial % 40, 4);
        const auto s = compute_signals(t, SignalConfig{});
        CHECK(s.escalation.size() == t.size());
        for (double e : s.escalation) CHECK((e >= 0.0 && e <= 1.0));
        CHECK((s.safety_stat >= 0.0 && s.safety_stat <= 1.0));
    }
}

// =============================================================================
// Trace I/O
// =============================================================================

TEST_CASE("trace JSON round trip") {
    std::mt19937_64 rng(3);
    const auto t = random_trace(rng, 12, 3);
    auto back = parse_trace(trace_to_json(t));
    REQUIRE(back.ok());
    CHECK(back.value() == t);
}

TEST_CASE("trace validation catches ordering and range errors") {
    Json j = Json::parse(R"([
        {"frame_index": 0, "timestamp": 1.0, "hand_centroid": [0.5, 1.5], "hazards": []},
        {"frame_index": 1, "timestamp": 1.0, "hazards": [{"prompt_id": "p", "confidence": 2, "area_ratio": 0.1, "centroid": [0, 0]}]}
    ])");
    auto r = parse_trace(j);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations().size() == 3);
    CHECK_FALSE(parse_trace(Json::object()).ok());
}

TEST_CASE("compute_signals rejects an empty trace") {
    CHECK_THROWS_AS(compute_signals(Trace{}, SignalConfig{}), InputError);
    SignalConfig bad;
    bad.smoothing_window = 0;
    CHECK_THROWS_AS(compute_signals(area_trace({0.1}), bad), ConfigError);
}
