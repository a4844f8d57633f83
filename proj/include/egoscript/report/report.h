#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egoscript/fusion/fusion.h"

namespace egoscript {

/// One line of the benchmark table. Means are over gate-valid samples and are
/// absent when the row has no valid sample. `overall` is the mean fusion
/// score times 100; every other mean stays on its [0,1] scale.
struct ReportRow {
    std::string mode_label;
    int total = 0;
    int valid = 0;
    int excluded = 0;
    std::optional<double> overall;
    std::optional<double> helpfulness;
    std::optional<double> tone;
    std::optional<double> latency_err;
    std::optional<double> safety_crit;
    bool operator==(const ReportRow&) const = default;
};

struct Report {
    std::vector<ReportRow> rows;
    FprCounts fpr_counts;
    bool operator==(const Report&) const = default;
};

/// "Reactive", "Explicit", "Implicit".
std::string_view mode_label(AssistanceMode m);
inline constexpr std::string_view kAllModesLabel = "All Modes";

/// Three mode rows in fixed order followed by the all-modes row.
std::vector<ReportRow> aggregate(std::span<const VideoScore> scores);
Report build_report(std::span<const VideoScore> scores);

enum class ExportFormat { Json, Csv, Text };
std::optional<ExportFormat> parse_export_format(std::string_view s);
std::string_view file_extension(ExportFormat f);

std::string export_rows(std::span<const ReportRow> rows, ExportFormat format);
std::string export_report(const Report& report, ExportFormat format);

/// Inverse of export_rows for the lossless formats (json, csv).
std::vector<ReportRow> import_rows(std::string_view doc, ExportFormat format);
Report import_report_json(std::string_view doc);

// =============================================================================
// Run comparison
// =============================================================================

struct PairedRow {
    std::string mode_label;
    std::string setting;
    ReportRow row;
};

/// b - a per column; absent where either side is not applicable.
struct DeltaRow {
    std::string mode_label;
    int total = 0;
    int valid = 0;
    int excluded = 0;
    std::optional<double> overall;
    std::optional<double> helpfulness;
    std::optional<double> tone;
    std::optional<double> latency_err;
    std::optional<double> safety_crit;
};

struct Comparison {
    std::vector<PairedRow> rows;
    std::vector<DeltaRow> deltas;
};

/// Throws InputError when the two reports do not carry the same labels in
/// the same order.
Comparison compare_runs(std::span<const ReportRow> a, std::span<const ReportRow> b,
                        const std::string& setting_a = "A", const std::string& setting_b = "B");

std::string export_comparison(const Comparison& c, ExportFormat format);

Json to_json(const ReportRow& r);

}  // namespace egoscript
