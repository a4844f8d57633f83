#include <doctest.h>

#include <cmath>
#include <fstream>

#include "egoscript/report/report.h"
#include "test_support.h"

using namespace egoscript;
using namespace egoscript::testing;

namespace {

std::vector<VideoScore> fixture_scores() {
    std::ifstream in(fixture_path("aggregation_60.json"));
    const auto doc = Json::parse(in);
    std::vector<VideoScore> out;
    for (const auto& j : doc["scores"]) out.push_back(decode_video_score(j).value());
    return out;
}

std::vector<ReportRow> fixture_expected() {
    std::ifstream in(fixture_path("aggregation_60.json"));
    const auto doc = Json::parse(in);
    std::vector<ReportRow> out;
    for (const auto& j : doc["expected_rows"]) {
        ReportRow r;
        r.mode_label = j["mode_label"];
        r.total = j["total"];
        r.valid = j["valid"];
        r.excluded = j["excluded"];
        r.overall = j["overall"].get<double>();
        r.helpfulness = j["helpfulness"].get<double>();
        r.tone = j["tone"].get<double>();
        r.latency_err = j["latency_err"].get<double>();
        r.safety_crit = j["safety_crit"].get<double>();
        out.push_back(r);
    }
    return out;
}

void check_close(const std::optional<double>& a, const std::optional<double>& b, double tol = 1e-12) {
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(std::fabs(*a - *b) <= tol);
}

VideoScore valid_score(AssistanceMode mode, double s) {
    VideoScore v;
    v.video_id = "video-x";
    v.mode = mode;
    v.alignment_score = 0.9;
    v.s = s;
    v.s_h = 0.5;
    v.s_lat = 0.25;
    v.e_lat = 0.75;
    return v;
}

}  // namespace

// =============================================================================
// Aggregation
// =============================================================================

TEST_CASE("aggregation fixture reproduces independent means") {
    const auto rows = aggregate(fixture_scores());
    const auto expected = fixture_expected();
    REQUIRE(rows.size() == 4);
    REQUIRE(expected.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CAPTURE(rows[i].mode_label);
        CHECK(rows[i].mode_label == expected[i].mode_label);
        CHECK(rows[i].total == expected[i].total);
        CHECK(rows[i].valid == expected[i].valid);
        CHECK(rows[i].excluded == expected[i].excluded);
        CHECK(rows[i].total == rows[i].valid + rows[i].excluded);
        check_close(rows[i].overall, expected[i].overall, 1e-10);
        check_close(rows[i].helpfulness, expected[i].helpfulness);
        check_close(rows[i].tone, expected[i].tone);
        check_close(rows[i].latency_err, expected[i].latency_err);
        check_close(rows[i].safety_crit, expected[i].safety_crit);
    }
    CHECK(rows[0].total == 20);
    CHECK(rows[0].valid == 7);
    CHECK(rows[0].excluded == 13);
    CHECK(rows[3].total == rows[0].total + rows[1].total + rows[2].total);
}

TEST_CASE("all excluded gives not-applicable means") {
    auto s = valid_score(AssistanceMode::Reactive, 0.5);
    s.gate_status = GateStatus::Excluded;
    const std::vector<VideoScore> scores{s};
    const auto rows = aggregate(scores);
    CHECK(rows[0].valid == 0);
    CHECK(rows[0].excluded == 1);
    CHECK_FALSE(rows[0].overall.has_value());
    CHECK_FALSE(rows[3].helpfulness.has_value());
}

TEST_CASE("single valid score is scaled by 100") {
    const std::vector<VideoScore> scores{valid_score(AssistanceMode::ExplicitProactive, 0.5939)};
    const auto rows = aggregate(scores);
    REQUIRE(rows[1].overall.has_value());
    CHECK(*rows[1].overall == doctest::Approx(59.39).epsilon(1e-14));
    CHECK(*rows[1].helpfulness == 0.5);
    CHECK(*rows[1].latency_err == 0.75);
}

TEST_CASE("empty input gives zero totals") {
    const auto rows = aggregate({});
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) CHECK(r.total == 0);
    CHECK(rows[3].mode_label == kAllModesLabel);
}

// =============================================================================
// Export
// =============================================================================

TEST_CASE("json and csv round-trip losslessly") {
    const auto rows = aggregate(fixture_scores());
    for (auto f : {ExportFormat::Json, ExportFormat::Csv}) {
        const auto doc = export_rows(rows, f);
        CHECK(import_rows(doc, f) == rows);
    }
    std::vector<VideoScore> none;
    const auto empty_rows = aggregate(none);
    CHECK(import_rows(export_rows(empty_rows, ExportFormat::Csv), ExportFormat::Csv) == empty_rows);
}

TEST_CASE("report json carries fpr") {
    auto scores = fixture_scores();
    auto benign = valid_score(AssistanceMode::Reactive, 0.2);
    benign.benign = true;
    benign.over_alert = true;
    scores.push_back(benign);
    const auto report = build_report(scores);
    CHECK(report.fpr_counts == FprCounts{1, 0});
    CHECK(import_report_json(export_report(report, ExportFormat::Json)) == report);
}

TEST_CASE("text table columns follow the benchmark order") {
    const auto text = export_rows(aggregate(fixture_scores()), ExportFormat::Text);
    const auto header = text.substr(0, text.find('\n'));
    const char* cols[] = {"Mode", "Total", "Valid", "Excluded", "Overall", "Helpfulness", "Tone", "LatencyErr",
                          "SafetyCrit"};
    std::size_t pos = 0;
    for (const char* c : cols) {
        const auto at = header.find(c, pos);
        REQUIRE(at != std::string::npos);
        pos = at + 1;
    }
    CHECK(text.find("All Modes") != std::string::npos);
    CHECK_THROWS(import_rows(text, ExportFormat::Text));
}

TEST_CASE("export formats parse") {
    CHECK(parse_export_format("json") == ExportFormat::Json);
    CHECK(parse_export_format("csv") == ExportFormat::Csv);
    CHECK(parse_export_format("text") == ExportFormat::Text);
    CHECK_FALSE(parse_export_format("xml").has_value());
}

// =============================================================================
// Comparison
// =============================================================================

TEST_CASE("comparison has eight paired rows") {
    const auto rows = aggregate(fixture_scores());
    const auto c = compare_runs(rows, rows, "observed", "zero-shot");
    CHECK(c.rows.size() == 8);
    REQUIRE(c.deltas.size() == 4);
    for (const auto& d : c.deltas) {
        CHECK(d.total == 0);
        CHECK(d.valid == 0);
        CHECK(d.overall == 0.0);
        CHECK(d.safety_crit == 0.0);
    }
    CHECK(c.rows[0].setting == "observed");
    CHECK(c.rows[1].setting == "zero-shot");
    CHECK_FALSE(export_comparison(c, ExportFormat::Text).empty());
    CHECK(Json::parse(export_comparison(c, ExportFormat::Json)).is_object());
}

TEST_CASE("mismatched labels are rejected") {
    const auto a = aggregate(fixture_scores());
    auto b = a;
    b[1].mode_label = "Proactive";
    CHECK_THROWS_AS(compare_runs(a, b), InputError);
    b.pop_back();
    CHECK_THROWS_AS(compare_runs(a, b), InputError);
}
