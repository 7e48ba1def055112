#include "viascope/leveling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace viascope {

int LevelingParams::default_window_radius(double spatial_sigma) {
    return std::max(1, static_cast<int>(std::ceil(3.0 * spatial_sigma)));
}

LevelingParams LevelingParams::defaults_for(const DepthMap& map) {
    LevelingParams params;
    params.spatial_sigma = 2.0;
    params.window_radius = default_window_radius(params.spatial_sigma);
    const double ptv = raster_max(map.z) - raster_min(map.z);
    params.depth_sigma = ptv > 0.0 ? 0.1 * ptv : 1.0;
    return params;
}

void LevelingParams::validate() const {
    if (!(spatial_sigma > 0.0) || !std::isfinite(spatial_sigma)) {
        throw Error(ErrorCode::InvalidArgument, "spatial_sigma must be positive");
    }
    if (!(depth_sigma > 0.0) || !std::isfinite(depth_sigma)) {
        throw Error(ErrorCode::InvalidArgument, "depth_sigma must be positive");
    }
    if (window_radius < 1) throw Error(ErrorCode::InvalidArgument, "window_radius must be at least 1");
}

double range_weight(double z, double mean, double depth_sigma) {
    const double d = z - mean;
    return std::exp(-(d * d) / (2.0 * depth_sigma * depth_sigma));
}

double leveling_anchor(const DepthMap& map, MeanRegion region) {
    const auto values = map.z.values();
    if (values.empty()) throw Error(ErrorCode::EmptyRaster, "depth map is empty");
    // Summing in sorted order makes the anchor independent of pixel order.
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto first = sorted.cbegin();
    if (region == MeanRegion::Surface) first += static_cast<std::ptrdiff_t>(sorted.size() / 2);
    const double sum = std::accumulate(first, sorted.cend(), 0.0);
    return sum / static_cast<double>(std::distance(first, sorted.cend()));
}

DepthMap level_depth(const DepthMap& map, const LevelingParams& params, MeanRegion region) {
    params.validate();
    const double anchor = leveling_anchor(map, region);
    const std::size_t w = map.width();
    const std::size_t h = map.height();
    const int r = params.window_radius;

    std::vector<double> spatial(static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            spatial[static_cast<std::size_t>((dy + r) * (2 * r + 1) + (dx + r))] =
                std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * params.spatial_sigma * params.spatial_sigma));
        }
    }
    RasterD range(w, h);
    for (std::size_t i = 0; i < map.z.size(); ++i) range[i] = range_weight(map.z[i], anchor, params.depth_sigma);

    // Samples are combined in mirror-symmetric groups so that reflecting the
    // input reflects the output bit for bit.
    const auto sample = [&](int x, int y, int dx, int dy, double& num, double& den) {
        const int xx = x + dx;
        const int yy = y + dy;
        num = 0.0;
        den = 0.0;
        if (xx < 0 || yy < 0 || xx >= static_cast<int>(w) || yy >= static_cast<int>(h)) return;
        const auto sx = static_cast<std::size_t>(xx);
        const auto sy = static_cast<std::size_t>(yy);
        den = spatial[static_cast<std::size_t>((dy + r) * (2 * r + 1) + (dx + r))] * range(sx, sy);
        num = den * map.z(sx, sy);
    };

    DepthMap out{RasterD(w, h), map.pixel_pitch};
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const int x0 = static_cast<int>(x);
            const int y0 = static_cast<int>(y);
            double num = 0.0;
            double den = 0.0;
            for (int ay = 0; ay <= r; ++ay) {
                for (int ax = 0; ax <= r; ++ax) {
                    double n[4] = {};
                    double d[4] = {};
                    sample(x0, y0, ax, ay, n[0], d[0]);
                    if (ax > 0) sample(x0, y0, -ax, ay, n[1], d[1]);
                    if (ay > 0) {
                        sample(x0, y0, ax, -ay, n[2], d[2]);
                        if (ax > 0) sample(x0, y0, -ax, -ay, n[3], d[3]);
                    }
                    num += (n[0] + n[1]) + (n[2] + n[3]);
                    den += (d[0] + d[1]) + (d[2] + d[3]);
                }
            }
            if (!(den >= 1e-300)) {
                throw Error(ErrorCode::DegenerateWeights, "all leveling weights vanish; depth_sigma is too small");
            }
            out.z(x, y) = num / den;
        }
    }
    const double lowest = raster_min(out.z);
    for (double& v : out.z.values()) v -= lowest;
    return out;
}

}  // namespace viascope
