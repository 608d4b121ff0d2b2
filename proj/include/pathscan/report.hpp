#pragma once

// Report persistence: CSV (one row per (psi, metric)), JSON (full nested
// report with a config echo and version string), and a single-file SVG line
// plot.  A bundled CSV reader closes the round-trip so downstream tooling
// never needs to guess the dialect.
//
// Floats are printed with %.17g, enough digits to reproduce every double
// exactly, which is what makes byte-identical determinism checkable.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathscan/risk.hpp"

#ifndef PATHSCAN_VERSION
#define PATHSCAN_VERSION "0.1.0-unversioned"
#endif

namespace pathscan {

inline const char* version_string() { return PATHSCAN_VERSION; }

/// One CSV record.  `theory` may be NaN (serialized as an empty field) when
/// a metric has no theoretical column.
struct CsvRow {
    double psi = 0.0;
    std::string metric;
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double theory = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t trials = 0;
};

namespace detail {

inline std::string fmt17(double x) {
    if (std::isnan(x)) return "";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

inline double parse_double_field(const std::string& field,
                                 const std::string& context) {
    if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t used = 0;
        const double value = std::stod(field, &used);
        if (used == field.size()) return value;
    } catch (const std::exception&) {
        // fall through to the contextual error
    }
    throw std::runtime_error("csv: malformed number \"" + field + "\" in " +
                             context);
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot open \"" + path + "\"");
    out << content;
    if (!out.flush())
        throw std::runtime_error("emit: write failed for \"" + path + "\"");
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "psi,metric,estimate,ci_lo,ci_hi,theory,trials";

inline std::string csv_string(const std::vector<CsvRow>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const CsvRow& r : rows) {
        out += detail::fmt17(r.psi);
        out += ',';
        out += r.metric;
        out += ',';
        out += detail::fmt17(r.estimate);
        out += ',';
        out += detail::fmt17(r.ci_lo);
        out += ',';
        out += detail::fmt17(r.ci_hi);
        out += ',';
        out += detail::fmt17(r.theory);
        out += ',';
        out += std::to_string(r.trials);
        out += '\n';
    }
    return out;
}

/// The bundled reader: parses exactly what csv_string emits.
inline std::vector<CsvRow> parse_csv(const std::string& text) {
    std::vector<CsvRow> rows;
    std::stringstream lines(text);
    std::string line;
    if (!std::getline(lines, line) || line != kCsvHeader)
        throw std::runtime_error("csv: missing or unexpected header line");
    std::size_t lineno = 1;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) fields.push_back(cell);
        if (line.back() == ',') fields.push_back("");
        if (fields.size() != 7)
            throw std::runtime_error("csv: line " + std::to_string(lineno) +
                                     " has " + std::to_string(fields.size()) +
                                     " fields, expected 7");
        const std::string context = "line " + std::to_string(lineno);
        CsvRow row;
        row.psi = detail::parse_double_field(fields[0], context);
        row.metric = fields[1];
        row.estimate = detail::parse_double_field(fields[2], context);
        row.ci_lo = detail::parse_double_field(fields[3], context);
        row.ci_hi = detail::parse_double_field(fields[4], context);
        row.theory = detail::parse_double_field(fields[5], context);
        row.trials = std::stoull(fields[6]);
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<CsvRow> risk_csv_rows(const RiskReport& report) {
    std::vector<CsvRow> rows;
    for (const RiskRow& r : report.rows) {
        rows.push_back({r.psi, "type_i", r.type_i, r.type_i_ci.lo,
                        r.type_i_ci.hi, r.null_bound, r.trials});
        rows.push_back({r.psi, "type_ii_worst", r.type_ii_worst,
                        r.type_ii_worst_ci.lo, r.type_ii_worst_ci.hi,
                        r.psi_min_t, r.trials});
        rows.push_back({r.psi, "type_ii_mean", r.type_ii_mean,
                        r.type_ii_mean_ci.lo, r.type_ii_mean_ci.hi,
                        r.psi_min_t, r.trials});
        if (!std::isnan(r.lower_bound))
            rows.push_back({r.psi, "lower_bound", r.lower_bound, r.lower_bound,
                            r.lower_bound, r.lower_bound,
                            report.config.bound_trials});
    }
    return rows;
}

inline std::vector<CsvRow> moment_csv_rows(const MomentReport& report) {
    std::vector<CsvRow> rows;
    for (const MomentCell& c : report.cells) {
        rows.push_back({c.psi, "moment_mean", c.mean, c.mean_ci.lo,
                        c.mean_ci.hi, c.expected_mean, c.trials});
        // The variance row's theory column carries the cap it must respect.
        rows.push_back({c.psi, "moment_variance", c.variance, c.variance,
                        c.variance, 3.0 * c.mean + c.var_slack, c.trials});
    }
    return rows;
}

inline nlohmann::json interval_to_json(const Interval& ci) {
    return nlohmann::json{ci.lo, ci.hi};
}

inline nlohmann::json risk_report_to_json(const RiskReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const RiskRow& r : report.rows) {
        nlohmann::json row{{"psi", r.psi},
                           {"type_i", r.type_i},
                           {"type_i_ci", interval_to_json(r.type_i_ci)},
                           {"type_ii_worst", r.type_ii_worst},
                           {"type_ii_worst_ci",
                            interval_to_json(r.type_ii_worst_ci)},
                           {"type_ii_mean", r.type_ii_mean},
                           {"type_ii_mean_ci",
                            interval_to_json(r.type_ii_mean_ci)},
                           {"null_bound", r.null_bound},
                           {"psi_min_t", r.psi_min_t},
                           {"trials", r.trials}};
        if (!std::isnan(r.lower_bound)) row["lower_bound"] = r.lower_bound;
        rows.push_back(row);
    }
    return nlohmann::json{{"version", version_string()},
                          {"config", config_to_json(report.config)},
                          {"t", report.t},
                          {"log_cardinality", report.log_cardinality},
                          {"panel_size", report.panel_size},
                          {"panel_exhaustive", report.panel_exhaustive},
                          {"engine_exact", report.engine_exact},
                          {"rows", rows}};
}

inline nlohmann::json moment_report_to_json(const MomentReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (const MomentCell& c : report.cells) {
        cells.push_back(nlohmann::json{
            {"psi", c.psi},
            {"t", c.t},
            {"q", c.q},
            {"expected_mean", c.expected_mean},
            {"mean", c.mean},
            {"mean_ci", interval_to_json(c.mean_ci)},
            {"variance", c.variance},
            {"var_slack", c.var_slack},
            {"mean_ok", c.mean_ok},
            {"var_ok", c.var_ok},
            {"applicable", c.applicable},
            {"trials", c.trials}});
    }
    return nlohmann::json{{"version", version_string()},
                          {"config", config_to_json(report.config)},
                          {"planted", report.planted},
                          {"cells", cells}};
}

namespace detail {

struct SvgSeries {
    std::string name;
    std::string color;
    std::vector<std::pair<double, double>> points;  // (psi, value)
};

inline std::string fmt_svg(double x) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", x);
    return buffer;
}

/// Minimal line plot: risk estimates against psi, values clamped to the
/// unit interval, one polyline per metric plus dashed theory guides.
inline std::string svg_line_plot(const std::vector<SvgSeries>& series,
                                 double null_bound, double psi_min_t,
                                 const std::string& title) {
    const double width = 720, height = 480;
    const double left = 70, right = 690, top = 50, bottom = 430;
    double psi_lo = 0.0, psi_hi = 1.0;
    if (!series.empty() && !series.front().points.empty()) {
        psi_lo = psi_hi = series.front().points.front().first;
        for (const auto& s : series)
            for (const auto& p : s.points) {
                psi_lo = std::min(psi_lo, p.first);
                psi_hi = std::max(psi_hi, p.first);
            }
    }
    if (psi_hi <= psi_lo) {  // degenerate single-psi grid
        psi_lo -= 0.5;
        psi_hi += 0.5;
    }
    const auto x_of = [&](double psi) {
        return left + (psi - psi_lo) / (psi_hi - psi_lo) * (right - left);
    };
    const auto y_of = [&](double v) {
        const double clamped = std::min(1.0, std::max(0.0, v));
        return bottom - clamped * (bottom - top);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
           fmt_svg(width) + " " + fmt_svg(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"70\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\">" +
           title + "</text>\n";

    // Axes and y ticks.
    out += "<line x1=\"" + fmt_svg(left) + "\" y1=\"" + fmt_svg(bottom) +
           "\" x2=\"" + fmt_svg(right) + "\" y2=\"" + fmt_svg(bottom) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + fmt_svg(left) + "\" y1=\"" + fmt_svg(top) +
           "\" x2=\"" + fmt_svg(left) + "\" y2=\"" + fmt_svg(bottom) +
           "\" stroke=\"black\"/>\n";
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        out += "<text x=\"" + fmt_svg(left - 40) + "\" y=\"" +
               fmt_svg(y_of(tick) + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_svg(tick) + "</text>\n";
        out += "<line x1=\"" + fmt_svg(left - 4) + "\" y1=\"" +
               fmt_svg(y_of(tick)) + "\" x2=\"" + fmt_svg(left) + "\" y2=\"" +
               fmt_svg(y_of(tick)) + "\" stroke=\"black\"/>\n";
    }
    for (double tick : {psi_lo, 0.5 * (psi_lo + psi_hi), psi_hi}) {
        out += "<text x=\"" + fmt_svg(x_of(tick) - 12) + "\" y=\"" +
               fmt_svg(bottom + 20) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_svg(tick) + "</text>\n";
    }
    out += "<text x=\"" + fmt_svg(0.5 * (left + right)) + "\" y=\"" +
           fmt_svg(height - 10) +
           "\" font-family=\"sans-serif\" font-size=\"12\">psi</text>\n";

    // Theory guides (not polylines: the polyline count is the metric count).
    if (null_bound >= 0.0 && null_bound <= 1.0) {
        out += "<line x1=\"" + fmt_svg(left) + "\" y1=\"" +
               fmt_svg(y_of(null_bound)) + "\" x2=\"" + fmt_svg(right) +
               "\" y2=\"" + fmt_svg(y_of(null_bound)) +
               "\" stroke=\"gray\" stroke-dasharray=\"6 3\"/>\n";
    }
    if (psi_min_t >= psi_lo && psi_min_t <= psi_hi) {
        out += "<line x1=\"" + fmt_svg(x_of(psi_min_t)) + "\" y1=\"" +
               fmt_svg(top) + "\" x2=\"" + fmt_svg(x_of(psi_min_t)) +
               "\" y2=\"" + fmt_svg(bottom) +
               "\" stroke=\"gray\" stroke-dasharray=\"2 4\"/>\n";
    }

    // One polyline per metric, plus a text legend.
    double legend_y = top + 10;
    for (const auto& s : series) {
        out += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : s.points)
            out += fmt_svg(x_of(p.first)) + "," + fmt_svg(y_of(p.second)) + " ";
        out += "\"/>\n";
        out += "<text x=\"" + fmt_svg(right - 150) + "\" y=\"" +
               fmt_svg(legend_y) + "\" font-family=\"sans-serif\" "
               "font-size=\"11\" fill=\"" + s.color + "\">" + s.name +
               "</text>\n";
        legend_y += 14;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace detail

inline std::string risk_svg_string(const RiskReport& report) {
    std::vector<detail::SvgSeries> series(3);
    series[0] = {"type_i", "#1f77b4", {}};
    series[1] = {"type_ii_worst", "#d62728", {}};
    series[2] = {"type_ii_mean", "#ff7f0e", {}};
    bool any_bound = false;
    for (const RiskRow& r : report.rows) any_bound |= !std::isnan(r.lower_bound);
    if (any_bound) series.push_back({"lower_bound", "#2ca02c", {}});
    for (const RiskRow& r : report.rows) {
        series[0].points.push_back({r.psi, r.type_i});
        series[1].points.push_back({r.psi, r.type_ii_worst});
        series[2].points.push_back({r.psi, r.type_ii_mean});
        if (any_bound && !std::isnan(r.lower_bound))
            series[3].points.push_back({r.psi, r.lower_bound});
    }
    const RiskRow& first = report.rows.front();
    return detail::svg_line_plot(series, first.null_bound, first.psi_min_t,
                                 "risk vs psi (t = " +
                                     detail::fmt_svg(report.t) + ")");
}

enum class EmitFormat { kCsv, kJson, kSvg };

/// Writes the report in one format next to config.out and returns the paths
/// written.  IO failures carry the offending path in the message.
inline std::vector<std::string> emit(const RiskReport& report, EmitFormat f) {
    if (report.rows.empty())
        throw std::runtime_error("emit: report has no rows");
    std::vector<std::string> written;
    switch (f) {
        case EmitFormat::kCsv: {
            const std::string path = report.config.out + ".csv";
            detail::write_text_file(path, csv_string(risk_csv_rows(report)));
            written.push_back(path);
            break;
        }
        case EmitFormat::kJson: {
            const std::string path = report.config.out + ".json";
            detail::write_text_file(path,
                                    risk_report_to_json(report).dump(2) + "\n");
            written.push_back(path);
            break;
        }
        case EmitFormat::kSvg: {
            const std::string path = report.config.out + ".svg";
            detail::write_text_file(path, risk_svg_string(report));
            written.push_back(path);
            break;
        }
    }
    return written;
}

inline std::vector<std::string> emit(const MomentReport& report,
                                     EmitFormat f) {
    if (report.cells.empty())
        throw std::runtime_error("emit: report has no cells");
    std::vector<std::string> written;
    switch (f) {
        case EmitFormat::kCsv: {
            const std::string path = report.config.out + ".csv";
            detail::write_text_file(path, csv_string(moment_csv_rows(report)));
            written.push_back(path);
            break;
        }
        case EmitFormat::kJson: {
            const std::string path = report.config.out + ".json";
            detail::write_text_file(
                path, moment_report_to_json(report).dump(2) + "\n");
            written.push_back(path);
            break;
        }
        case EmitFormat::kSvg:
            throw std::runtime_error(
                "emit: the moment report has no SVG rendering");
    }
    return written;
}

}  // namespace pathscan
