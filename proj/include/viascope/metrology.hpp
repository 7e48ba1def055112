#pragma once

#include <span>
#include <vector>

#include "viascope/depth_integration.hpp"

namespace viascope {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
};

/// Closed-form algebraic (Kasa) circle fit. Used to seed `fit_lsc`.
Circle fit_circle_algebraic(std::span<const Point2> points);

/// Geometric least-squares circle: minimizes sum (|p_i - c| - r)^2.
/// Algebraic seed followed by at most 50 Gauss-Newton steps; stops once the
/// step is below 1e-12 (relative to the point spread) and never accepts a
/// step that increases the objective by more than a relative 1e-12.
Circle fit_lsc(std::span<const Point2> points);

/// sum (|p_i - c| - r)^2
double lsc_objective(std::span<const Point2> points, const Circle& circle);

/// Peak-to-valley of the point distances to the circle center.
double roundness(std::span<const Point2> points, const Circle& circle);

/// Height of the wafer surface: mean of the samples in the fullest bin of a
/// 256-bin histogram over the map's range.
double surface_reference(const DepthMap& map);

/// Longest closed iso-contour at height surface_reference - level, in
/// micrometers. Marching squares with linear interpolation along pixel edges;
/// pixel (i, j) sits at (i * pitch, j * pitch).
std::vector<Point2> extract_slice_contour(const DepthMap& map, double level);

struct SliceProfile {
    double level = 0.0;  // micrometers below the surface reference
    Circle circle;
    double roundness = 0.0;
    std::size_t point_count = 0;
};

struct ViaMeasurement {
    double depth = 0.0;
    double diameter = 0.0;
    std::vector<SliceProfile> profiles;  // ascending level
};

inline constexpr double kDiameterLevelFraction = 0.10;
inline constexpr double kDepthFloorPercentile = 1.0;

SliceProfile measure_slice(const DepthMap& map, double level);

/// Depth is surface_reference minus the 1st percentile of the via region;
/// diameter is taken from the slice at 10% of the depth; profile slices sit at
/// the midpoints of `slice_count` equal bins spanning 5%..95% of the depth.
ViaMeasurement measure_via(const DepthMap& map, int slice_count);

struct ReferenceValues {
    double depth = 0.0;
    double diameter = 0.0;
};

struct ComparisonRow {
    double ref_depth = 0.0;
    double meas_depth = 0.0;
    double depth_err = 0.0;      // micrometers, measured - reference
    double depth_err_pct = 0.0;  // percent of reference
    double ref_diameter = 0.0;
    double meas_diameter = 0.0;
    double diameter_err = 0.0;
    double diameter_err_pct = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double depth_mape = 0.0;     // mean absolute percentage error
    double diameter_mape = 0.0;
};

ComparisonReport compare_to_reference(std::span<const ViaMeasurement> measured,
                                      std::span<const ReferenceValues> reference);

}  // namespace viascope
