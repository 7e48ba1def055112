#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "viascope/metrology.hpp"

namespace viascope {

// CSV schemas (header row always present, numbers as %.6g):
//   profiles:   via_id,level_um,center_x_um,center_y_um,radius_um,roundness_um
//   summary:    via_id,depth_um,diameter_um
//   reference:  via_id,ref_depth_um,ref_diam_um
//   comparison: via_id,ref_depth_um,meas_depth_um,depth_err_pct,ref_diam_um,meas_diam_um,diam_err_pct
// The comparison table ends with a MAPE row holding the mean absolute
// percentage errors in the two *_err_pct columns.
inline constexpr std::string_view kProfileHeader = "via_id,level_um,center_x_um,center_y_um,radius_um,roundness_um";
inline constexpr std::string_view kSummaryHeader = "via_id,depth_um,diameter_um";
inline constexpr std::string_view kReferenceHeader = "via_id,ref_depth_um,ref_diam_um";
inline constexpr std::string_view kComparisonHeader =
    "via_id,ref_depth_um,meas_depth_um,depth_err_pct,ref_diam_um,meas_diam_um,diam_err_pct";

std::string format_number(double value);

std::string emit_profiles_csv(std::span<const ViaMeasurement> vias);
std::string emit_summary_csv(std::span<const ViaMeasurement> vias);
std::string emit_comparison_csv(const ComparisonReport& report);

/// RFC 4180 parse; quoted fields may contain commas, quotes, and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Reads depth/diameter pairs from a summary or reference table.
std::vector<ReferenceValues> parse_summary_csv(std::string_view text);
std::vector<ReferenceValues> parse_reference_csv(std::string_view text);

}  // namespace viascope
