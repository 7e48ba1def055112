#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "viascope/raster.hpp"

namespace viascope {

/// K co-registered grayscale frames with linear intensities in [0, 1].
struct ImageStack {
    std::vector<RasterD> frames;
    double pixel_pitch = 1.0;  // micrometers per pixel

    std::size_t count() const noexcept { return frames.size(); }
    std::size_t width() const noexcept { return frames.empty() ? 0 : frames.front().width(); }
    std::size_t height() const noexcept { return frames.empty() ? 0 : frames.front().height(); }

    /// Throws ShapeMismatch / InvalidArgument when the stack is unusable.
    void validate() const;
};

/// Unit illumination directions, one per frame. Every direction has lz > 0.
class LightSet {
public:
    LightSet() = default;

    /// Accepts directions that are already unit length (within 1e-9).
    static LightSet from_directions(std::vector<Eigen::Vector3d> directions);

    std::size_t size() const noexcept { return directions_.size(); }
    const Eigen::Vector3d& operator[](std::size_t i) const { return directions_[i]; }
    std::span<const Eigen::Vector3d> directions() const noexcept { return directions_; }

    /// K x 3 matrix with one direction per row.
    Eigen::MatrixX3d matrix() const;

private:
    std::vector<Eigen::Vector3d> directions_;
};

/// Normalizes raw LED positions (millimeters, relative to the sample center).
LightSet normalize_lights(std::span<const Eigen::Vector3d> raw_positions);

/// Throws RankDeficientLights unless the direction matrix has rank 3.
void require_full_rank(const LightSet& lights);

struct NormalField {
    Raster<Eigen::Vector3d> normals;
    RasterD albedo;
    Mask mask;
    /// RMS residual of the per-pixel least-squares solve (0 where masked).
    RasterD residual;

    std::size_t width() const noexcept { return mask.width(); }
    std::size_t height() const noexcept { return mask.height(); }
};

/// Surface slopes in the y-down raster frame, dimensionless.
struct GradientField {
    RasterD p;  // dz/dx
    RasterD q;  // dz/dy
    Mask mask;

    std::size_t width() const noexcept { return mask.width(); }
    std::size_t height() const noexcept { return mask.height(); }
};

inline constexpr double kDefaultShadowThreshold = 0.01;

/// Per-pixel Lambertian least-squares solve of L m = I with rho = |m|, n = m / rho.
///
/// A pixel is masked when fewer than three samples exceed `shadow_threshold`
/// or the recovered albedo is below 1e-9. Samples at or below the threshold are left out of that pixel's
/// solve, so exactly three usable samples give an exactly determined system.
NormalField estimate_normals(const ImageStack& stack, const LightSet& lights,
                             double shadow_threshold = kDefaultShadowThreshold);

GradientField normals_to_gradients(const NormalField& field);

}  // namespace viascope
