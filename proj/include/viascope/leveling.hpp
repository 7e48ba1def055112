#pragma once

#include "viascope/depth_integration.hpp"

namespace viascope {

struct LevelingParams {
    double spatial_sigma = 2.0;  // pixels
    double depth_sigma = 1.0;    // micrometers
    int window_radius = 6;       // pixels

    /// spatial_sigma = 2 px, window = ceil(3 sigma), depth_sigma = 10% of the
    /// map's peak-to-valley (1 um for a flat map).
    static LevelingParams defaults_for(const DepthMap& map);
    static int default_window_radius(double spatial_sigma);

    void validate() const;
};

enum class MeanRegion {
    Global,   // mean over every pixel
    Surface,  // mean over pixels at or above the median height
};

/// Range weight exp(-(z - mean)^2 / (2 depth_sigma^2)).
double range_weight(double z, double mean, double depth_sigma);

/// Reference height the range kernel is anchored to.
double leveling_anchor(const DepthMap& map, MeanRegion region);

/// Gaussian smoothing whose weights favour heights close to the map's mean
/// height. The result is shifted so that its minimum is zero.
DepthMap level_depth(const DepthMap& map, const LevelingParams& params, MeanRegion region = MeanRegion::Global);

}  // namespace viascope
