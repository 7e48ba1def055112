#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "viascope/depth_integration.hpp"
#include "viascope/photometric_stereo.hpp"

namespace viascope {

enum class WallProfile { StraightTaper, CosineRoundedRim };

/// Blind via: flat floor of radius_bottom at -depth, wall up to radius_top.
struct ViaSpec {
    double center_x = 0.0;  // micrometers
    double center_y = 0.0;
    double radius_top = 0.0;
    double radius_bottom = 0.0;
    double depth = 0.0;
    WallProfile wall_profile = WallProfile::StraightTaper;
    /// Peak azimuthal perturbation of the rim radius (heat-affected zone model).
    double rim_noise_amplitude = 0.0;
};

enum class ShadowModel { None, Horizon };

struct SceneSpec {
    std::vector<ViaSpec> vias;
    std::size_t width = 0;
    std::size_t height = 0;
    double pixel_pitch = 1.0;  // micrometers per pixel
    double albedo = 0.8;
    double noise_sigma = 0.0;
    ShadowModel shadow_model = ShadowModel::None;

    void validate() const;
};

/// Walls steeper than this (degrees from horizontal) are masked in the
/// ground-truth normal field.
inline constexpr double kMaxRecoverableWallDeg = 85.0;

/// Rim perturbation of via `via_index`: a fixed band-limited function of the
/// azimuth (8 harmonics) scaled so its peak magnitude is 1.
double rim_shape(std::size_t via_index, double azimuth);

struct SurfaceSample {
    double z = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    /// Vertical wall of a cylindrical via: no finite gradient exists here.
    bool vertical_wall = false;
    /// Index of the via containing the point, or -1 on the wafer surface.
    int via = -1;
};

/// Closed-form surface at (x, y) micrometers. `wall_band` is the half width
/// within which a vertical wall is attributed to the point.
SurfaceSample sample_surface(const SceneSpec& scene, double x, double y, double wall_band);

DepthMap analytic_depth(const SceneSpec& scene);
NormalField analytic_normals(const SceneSpec& scene);

/// Lambertian render I = albedo * max(0, n . l), optional horizon shadows and
/// additive Gaussian noise clamped to [0, 1]. Deterministic for a given seed.
ImageStack render_scene(const SceneSpec& scene, const LightSet& lights, std::uint64_t seed);

}  // namespace viascope
