#include "egoscript/report/report.h"

#include <array>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "egoscript/domain/codec.h"

namespace egoscript {

namespace {

constexpr std::array<const char*, 9> kCsvHeader{"mode_label", "total",       "valid",
                                                "excluded",   "overall",     "helpfulness",
                                                "tone",       "latency_err", "safety_crit"};

/// Compensated (Neumaier) summation.
class Sum {
public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

ReportRow make_row(std::string label, std::span<const VideoScore> scores,
                   const std::optional<AssistanceMode>& mode) {
    ReportRow row;
    row.mode_label = std::move(label);
    Sum s, h, t, lat, sc;
    for (const auto& v : scores) {
        if (mode && v.mode != *mode) continue;
        ++row.total;
        if (v.gate_status != GateStatus::Valid) {
            ++row.excluded;
            continue;
        }
        ++row.valid;
        s.add(v.s);
        h.add(v.s_h);
        t.add(v.s_t);
        lat.add(v.e_lat);
        sc.add(v.s_sc);
    }
    if (row.valid > 0) {
        const double n = row.valid;
        row.overall = 100.0 * (s.value() / n);
        row.helpfulness = h.value() / n;
        row.tone = t.value() / n;
        row.latency_err = lat.value() / n;
        row.safety_crit = sc.value() / n;
    }
    return row;
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_real(const std::optional<double>& v) { return v ? format_real(*v) : "NA"; }

std::string text_real(const std::optional<double>& v, int precision) {
    return v ? fmt::format("{:.{}f}", *v, precision) : "N/A";
}

std::optional<double> parse_csv_real(const std::string& field) {
    if (field == "NA" || field.empty()) return std::nullopt;
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw InputError("bad number in csv: " + field);
    return v;
}

int parse_csv_int(const std::string& field) {
    std::size_t used = 0;
    const int v = std::stoi(field, &used);
    if (used != field.size()) throw InputError("bad count in csv: " + field);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

ReportRow row_from_json(const Json& j, std::size_t i) {
    Violations v;
    JsonReader r(j, fmt::format("rows[{}]", i), v);
    ReportRow row;
    row.mode_label = r.str("mode_label");
    row.total = static_cast<int>(r.number("total"));
    row.valid = static_cast<int>(r.number("valid"));
    row.excluded = static_cast<int>(r.number("excluded"));
    row.overall = r.opt_number("overall");
    row.helpfulness = r.opt_number("helpfulness");
    row.tone = r.opt_number("tone");
    row.latency_err = r.opt_number("latency_err");
    row.safety_crit = r.opt_number("safety_crit");
    if (!v.empty()) throw ValidationError("invalid report row: " + v.front().message, v);
    return row;
}

std::string text_table(std::span<const ReportRow> rows, bool with_setting,
                       std::span<const std::string> settings) {
    std::string out;
    const auto header = fmt::format("{:<12}{}{:>7}{:>7}{:>10}{:>9}{:>13}{:>8}{:>12}{:>12}\n", "Mode",
                                    with_setting ? fmt::format("{:<10}", "Setting") : std::string(),
                                    "Total", "Valid", "Excluded", "Overall", "Helpfulness", "Tone",
                                    "LatencyErr", "SafetyCrit");
    out += header;
    out += std::string(header.size() - 1, '-') + "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out += fmt::format("{:<12}{}{:>7}{:>7}{:>10}{:>9}{:>13}{:>8}{:>12}{:>12}\n", r.mode_label,
                           with_setting ? fmt::format("{:<10}", settings[i]) : std::string(), r.total,
                           r.valid, r.excluded, text_real(r.overall, 2), text_real(r.helpfulness, 4),
                           text_real(r.tone, 4), text_real(r.latency_err, 4), text_real(r.safety_crit, 4));
    }
    return out;
}

std::optional<double> diff(const std::optional<double>& a, const std::optional<double>& b) {
    if (!a || !b) return std::nullopt;
    return *b - *a;
}

}  // namespace

// =============================================================================
// Aggregation
// =============================================================================

std::string_view mode_label(AssistanceMode m) {
    switch (m) {
        case AssistanceMode::Reactive: return "Reactive";
        case AssistanceMode::ExplicitProactive: return "Explicit";
        case AssistanceMode::ImplicitProactive: return "Implicit";
    }
    return "Unknown";
}

std::vector<ReportRow> aggregate(std::span<const VideoScore> scores) {
    std::vector<ReportRow> rows;
    for (auto m : kAllModes) rows.push_back(make_row(std::string(mode_label(m)), scores, m));
    rows.push_back(make_row(std::string(kAllModesLabel), scores, std::nullopt));
    return rows;
}

Report build_report(std::span<const VideoScore> scores) {
    return Report{aggregate(scores), accumulate_fpr(scores)};
}

// =============================================================================
// Export and import
// =============================================================================

std::optional<ExportFormat> parse_export_format(std::string_view s) {
    if (s == "json") return ExportFormat::Json;
    if (s == "csv") return ExportFormat::Csv;
    if (s == "text" || s == "txt") return ExportFormat::Text;
    return std::nullopt;
}

std::string_view file_extension(ExportFormat f) {
    switch (f) {
        case ExportFormat::Json: return "json";
        case ExportFormat::Csv: return "csv";
        case ExportFormat::Text: return "txt";
    }
    return "txt";
}

Json to_json(const ReportRow& r) {
    return Json{{"mode_label", r.mode_label},
                {"total", r.total},
                {"valid", r.valid},
                {"excluded", r.excluded},
                {"overall", opt_json(r.overall)},
                {"helpfulness", opt_json(r.helpfulness)},
                {"tone", opt_json(r.tone)},
                {"latency_err", opt_json(r.latency_err)},
                {"safety_crit", opt_json(r.safety_crit)}};
}

std::string export_rows(std::span<const ReportRow> rows, ExportFormat format) {
    switch (format) {
        case ExportFormat::Json: {
            Json arr = Json::array();
            for (const auto& r : rows) arr.push_back(to_json(r));
            return Json{{"rows", arr}}.dump(2) + "\n";
        }
        case ExportFormat::Csv: {
            std::string out;
            for (std::size_t i = 0; i < kCsvHeader.size(); ++i) {
                out += i ? "," : "";
                out += kCsvHeader[i];
            }
            out += "\n";
            for (const auto& r : rows) {
                out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.mode_label, r.total, r.valid,
                                   r.excluded, csv_real(r.overall), csv_real(r.helpfulness),
                                   csv_real(r.tone), csv_real(r.latency_err), csv_real(r.safety_crit));
            }
            return out;
        }
        case ExportFormat::Text:
            return text_table(rows, false, {});
    }
    return {};
}

std::string export_report(const Report& report, ExportFormat format) {
    const auto rate = fpr(report.fpr_counts);
    if (format == ExportFormat::Json) {
        Json j = Json::parse(export_rows(report.rows, format));
        j["fpr"] = {{"fp", report.fpr_counts.fp},
                    {"tn", report.fpr_counts.tn},
                    {"value", opt_json(rate)}};
        return j.dump(2) + "\n";
    }
    if (format == ExportFormat::Text) {
        return export_rows(report.rows, format) +
               fmt::format("\nOver-alert FPR: {}\n",
                           rate ? fmt::format("{:.4f} (FP={}, TN={})", *rate, report.fpr_counts.fp,
                                              report.fpr_counts.tn)
                                : std::string("not applicable (no benign videos)"));
    }
    return export_rows(report.rows, format);
}

std::vector<ReportRow> import_rows(std::string_view doc, ExportFormat format) {
    std::vector<ReportRow> rows;
    if (format == ExportFormat::Json) {
        Json j;
        try {
            j = Json::parse(doc);
        } catch (const Json::parse_error& e) {
            throw InputError(std::string("report json: ") + e.what());
        }
        if (!j.contains("rows") || !j["rows"].is_array()) throw InputError("report json has no rows array");
        for (std::size_t i = 0; i < j["rows"].size(); ++i) rows.push_back(row_from_json(j["rows"][i], i));
        return rows;
    }
    if (format == ExportFormat::Csv) {
        std::istringstream in{std::string(doc)};
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            auto f = split_csv_line(line);
            if (f.size() != kCsvHeader.size()) throw InputError("report csv: wrong column count");
            if (header) {
                header = false;
                continue;
            }
            try {
                rows.push_back(ReportRow{f[0], parse_csv_int(f[1]), parse_csv_int(f[2]), parse_csv_int(f[3]),
                                         parse_csv_real(f[4]), parse_csv_real(f[5]), parse_csv_real(f[6]),
                                         parse_csv_real(f[7]), parse_csv_real(f[8])});
            } catch (const std::logic_error&) {
                throw InputError("report csv: unparsable field in line: " + line);
            }
        }
        return rows;
    }
    throw InputError("the text table is presentation only and cannot be imported");
}

Report import_report_json(std::string_view doc) {
    Report r;
    r.rows = import_rows(doc, ExportFormat::Json);
    const Json j = Json::parse(doc);
    if (j.contains("fpr") && j["fpr"].is_object()) {
        r.fpr_counts.fp = j["fpr"].value("fp", 0);
        r.fpr_counts.tn = j["fpr"].value("tn", 0);
    }
    return r;
}

// =============================================================================
// Run comparison
// =============================================================================

Comparison compare_runs(std::span<const ReportRow> a, std::span<const ReportRow> b,
                        const std::string& setting_a, const std::string& setting_b) {
    if (a.size() != b.size()) throw InputError("compared reports have different row counts");
    Comparison c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].mode_label != b[i].mode_label) {
            throw InputError(fmt::format("mode label mismatch at row {}: '{}' vs '{}'", i, a[i].mode_label,
                                         b[i].mode_label));
        }
        c.rows.push_back({a[i].mode_label, setting_a, a[i]});
        c.rows.push_back({b[i].mode_label, setting_b, b[i]});
        c.deltas.push_back({a[i].mode_label, b[i].total - a[i].total, b[i].valid - a[i].valid,
                            b[i].excluded - a[i].excluded, diff(a[i].overall, b[i].overall),
                            diff(a[i].helpfulness, b[i].helpfulness), diff(a[i].tone, b[i].tone),
                            diff(a[i].latency_err, b[i].latency_err),
                            diff(a[i].safety_crit, b[i].safety_crit)});
    }
    return c;
}

std::string export_comparison(const Comparison& c, ExportFormat format) {
    std::vector<ReportRow> rows;
    std::vector<std::string> settings;
    for (const auto& p : c.rows) {
        rows.push_back(p.row);
        settings.push_back(p.setting);
    }
    for (const auto& d : c.deltas) {
        rows.push_back(ReportRow{d.mode_label, d.total, d.valid, d.excluded, d.overall, d.helpfulness,
                                 d.tone, d.latency_err, d.safety_crit});
        settings.push_back("delta");
    }
    if (format == ExportFormat::Text) return text_table(rows, true, settings);
    if (format == ExportFormat::Csv) {
        std::string out = "setting," + export_rows(std::span(rows).first(0), ExportFormat::Csv);
        const std::string body = export_rows(rows, ExportFormat::Csv);
        std::istringstream in(body);
        std::string line;
        std::getline(in, line);
        for (std::size_t i = 0; std::getline(in, line); ++i) out += settings[i] + "," + line + "\n";
        return out;
    }
    Json paired = Json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Json r = to_json(rows[i]);
        r["setting"] = settings[i];
        paired.push_back(std::move(r));
    }
    return Json{{"rows", paired}}.dump(2) + "\n";
}

}  // namespace egoscript
