#include "viascope/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace viascope {
namespace {

void append_row(std::string& out, std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out.push_back(',');
        out += f;
        first = false;
    }
    out += "\r\n";
}

std::string header(std::string_view h) { return std::string(h) + "\r\n"; }

double parse_number(const std::string& field) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::MalformedHeader, "cannot parse number '" + field + "'");
    }
    return v;
}

std::vector<ReferenceValues> parse_pairs(std::string_view text, std::string_view expected_header) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw Error(ErrorCode::MalformedHeader, "CSV is empty");
    std::string got;
    for (std::size_t i = 0; i < rows[0].size(); ++i) got += (i ? "," : "") + rows[0][i];
    if (got != expected_header) {
        throw Error(ErrorCode::MalformedHeader, "expected header '" + std::string(expected_header) + "'");
    }
    std::vector<ReferenceValues> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 3) throw Error(ErrorCode::MalformedHeader, "row " + std::to_string(i) + " needs 3 fields");
        out.push_back({parse_number(rows[i][1]), parse_number(rows[i][2])});
    }
    return out;
}

}  // namespace

std::string format_number(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.6g", value == 0.0 ? 0.0 : value);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string emit_profiles_csv(std::span<const ViaMeasurement> vias) {
    std::string out = header(kProfileHeader);
    for (std::size_t i = 0; i < vias.size(); ++i) {
        for (const auto& p : vias[i].profiles) {
            append_row(out, {std::to_string(i), format_number(p.level), format_number(p.circle.cx),
                             format_number(p.circle.cy), format_number(p.circle.r), format_number(p.roundness)});
        }
    }
    return out;
}

std::string emit_summary_csv(std::span<const ViaMeasurement> vias) {
    std::string out = header(kSummaryHeader);
    for (std::size_t i = 0; i < vias.size(); ++i) {
        append_row(out, {std::to_string(i), format_number(vias[i].depth), format_number(vias[i].diameter)});
    }
    return out;
}

std::string emit_comparison_csv(const ComparisonReport& report) {
    std::string out = header(kComparisonHeader);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        append_row(out, {std::to_string(i), format_number(r.ref_depth), format_number(r.meas_depth),
                         format_number(r.depth_err_pct), format_number(r.ref_diameter),
                         format_number(r.meas_diameter), format_number(r.diameter_err_pct)});
    }
    append_row(out, {"MAPE", "", "", format_number(report.depth_mape), "", "", format_number(report.diameter_mape)});
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            row_started = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            row_started = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (row_started || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row.clear();
            row_started = false;
        } else {
            field.push_back(c);
            row_started = true;
        }
    }
    if (quoted) throw Error(ErrorCode::MalformedHeader, "unterminated quoted CSV field");
    if (row_started || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ReferenceValues> parse_summary_csv(std::string_view text) { return parse_pairs(text, kSummaryHeader); }

std::vector<ReferenceValues> parse_reference_csv(std::string_view text) { return parse_pairs(text, kReferenceHeader); }

}  // namespace viascope
