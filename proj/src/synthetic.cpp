#include "viascope/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace viascope {
namespace {

constexpr int kRimHarmonics = 8;
constexpr std::uint64_t kRimSeed = 0x5eed'0f'7153ULL;

struct RimCoefficients {
    std::array<double, kRimHarmonics> amplitude{};
    std::array<double, kRimHarmonics> phase{};
    double peak = 1.0;
};

double unit_uniform(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

RimCoefficients make_rim(std::size_t via_index) {
    std::mt19937_64 engine(kRimSeed + via_index);
    RimCoefficients c;
    for (int k = 0; k < kRimHarmonics; ++k) {
        c.amplitude[static_cast<std::size_t>(k)] = (0.5 + 0.5 * unit_uniform(engine)) / (1.0 + k);
        c.phase[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * unit_uniform(engine);
    }
    double peak = 0.0;
    for (int i = 0; i < 8192; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / 8192.0;
        double v = 0.0;
        for (int k = 0; k < kRimHarmonics; ++k) {
            v += c.amplitude[static_cast<std::size_t>(k)] * std::cos((k + 1) * phi + c.phase[static_cast<std::size_t>(k)]);
        }
        peak = std::max(peak, std::abs(v));
    }
    c.peak = peak;
    return c;
}

const RimCoefficients& rim_coefficients(std::size_t via_index) {
    thread_local std::vector<RimCoefficients> cache;
    while (cache.size() <= via_index) cache.push_back(make_rim(cache.size()));
    return cache[via_index];
}

// Value and azimuthal derivative of the normalized rim function.
std::pair<double, double> rim_eval(std::size_t via_index, double phi) {
    const auto& c = rim_coefficients(via_index);
    double v = 0.0;
    double dv = 0.0;
    for (int k = 0; k < kRimHarmonics; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const double arg = (k + 1) * phi + c.phase[ks];
        v += c.amplitude[ks] * std::cos(arg);
        dv -= c.amplitude[ks] * (k + 1) * std::sin(arg);
    }
    return {v / c.peak, dv / c.peak};
}

double max_rim_radius(const ViaSpec& via) { return via.radius_top + via.rim_noise_amplitude; }

bool shadowed(const SceneSpec& scene, const SurfaceSample& at, double x, double y, const Eigen::Vector3d& light) {
    if (at.via < 0 || at.z >= 0.0) return false;
    const double horizontal = std::hypot(light.x(), light.y());
    if (horizontal < 1e-12) return false;
    const Eigen::Vector2d dir(light.x() / horizontal, light.y() / horizontal);
    const double rise = light.z() / horizontal;
    const double step = scene.pixel_pitch / 8.0;
    const auto& via = scene.vias[static_cast<std::size_t>(at.via)];
    const double reach = 2.0 * max_rim_radius(via) + scene.pixel_pitch;
    for (double s = step; s <= reach; s += step) {
        const double ray = at.z + s * rise;
        if (ray >= 0.0) return false;
        const auto terrain = sample_surface(scene, x + s * dir.x(), y + s * dir.y(), 0.0);
        if (terrain.z > ray) return true;
    }
    return false;
}

}  // namespace

void SceneSpec::validate() const {
    if (width == 0 || height == 0) throw Error(ErrorCode::EmptyRaster, "scene raster is empty");
    if (!(pixel_pitch > 0.0) || !std::isfinite(pixel_pitch)) {
        throw Error(ErrorCode::InvalidArgument, "pixel pitch must be positive");
    }
    if (!(albedo > 0.0 && albedo <= 1.0)) throw Error(ErrorCode::InvalidArgument, "albedo must lie in (0, 1]");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw Error(ErrorCode::InvalidArgument, "noise_sigma must be non-negative");
    }
    for (const auto& v : vias) {
        if (!(v.radius_bottom > 0.0) || !(v.radius_top >= v.radius_bottom) || !std::isfinite(v.radius_top)) {
            throw Error(ErrorCode::InvalidArgument, "via radii must satisfy radius_top >= radius_bottom > 0");
        }
        if (!(v.depth > 0.0) || !std::isfinite(v.depth)) throw Error(ErrorCode::InvalidArgument, "via depth must be positive");
        if (!(v.rim_noise_amplitude >= 0.0) || !(v.rim_noise_amplitude < v.radius_top)) {
            throw Error(ErrorCode::InvalidArgument, "rim noise amplitude must lie in [0, radius_top)");
        }
        if (!std::isfinite(v.center_x) || !std::isfinite(v.center_y)) {
            throw Error(ErrorCode::InvalidArgument, "via center is not finite");
        }
    }
    for (std::size_t i = 0; i < vias.size(); ++i) {
        for (std::size_t j = i + 1; j < vias.size(); ++j) {
            const double d = std::hypot(vias[i].center_x - vias[j].center_x, vias[i].center_y - vias[j].center_y);
            if (d < max_rim_radius(vias[i]) + max_rim_radius(vias[j])) {
                throw Error(ErrorCode::OverlappingVias,
                            "vias " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
            }
        }
    }
}

double rim_shape(std::size_t via_index, double azimuth) { return rim_eval(via_index, azimuth).first; }

SurfaceSample sample_surface(const SceneSpec& scene, double x, double y, double wall_band) {
    SurfaceSample out;
    for (std::size_t i = 0; i < scene.vias.size(); ++i) {
        const auto& via = scene.vias[i];
        const double dx = x - via.center_x;
        const double dy = y - via.center_y;
        const double r = std::hypot(dx, dy);
        if (r >= max_rim_radius(via) + wall_band) continue;

        const double phi = std::atan2(dy, dx);
        double top = via.radius_top;
        double dtop = 0.0;
        if (via.rim_noise_amplitude > 0.0) {
            const auto [g, dg] = rim_eval(i, phi);
            top += via.rim_noise_amplitude * g;
            dtop = via.rim_noise_amplitude * dg;
        }
        const bool clamped = via.radius_bottom >= top;
        const double bottom = clamped ? top : via.radius_bottom;
        const double dbottom = clamped ? dtop : 0.0;
        const Eigen::Vector2d radial = r > 0.0 ? Eigen::Vector2d(dx / r, dy / r) : Eigen::Vector2d(1.0, 0.0);
        const Eigen::Vector2d tangential(-radial.y(), radial.x());

        if (top - bottom <= 0.0) {
            // Vertical wall: the height is a step, the wall band carries a horizontal normal.
            out.via = static_cast<int>(i);
            out.z = r < top ? -via.depth : 0.0;
            if (std::abs(r - top) <= wall_band) {
                out.vertical_wall = true;
                out.normal = Eigen::Vector3d(-radial.x(), -radial.y(), 0.0);
            }
            if (out.z == 0.0 && !out.vertical_wall) out.via = -1;
            return out;
        }
        if (r >= top) continue;

        out.via = static_cast<int>(i);
        if (r <= bottom) {
            out.z = -via.depth;
            return out;
        }
        const double span = top - bottom;
        const double s = (r - bottom) / span;
        double shape = 0.0;       // fraction of the depth below the surface
        double dshape_ds = 0.0;
        if (via.wall_profile == WallProfile::StraightTaper) {
            shape = 1.0 - s;
            dshape_ds = -1.0;
        } else {
            shape = 0.5 * (1.0 + std::cos(std::numbers::pi * s));
            dshape_ds = -0.5 * std::numbers::pi * std::sin(std::numbers::pi * s);
        }
        out.z = -via.depth * shape;
        const double ds_dr = 1.0 / span;
        const double ds_dphi = (-dbottom * span - (r - bottom) * (dtop - dbottom)) / (span * span);
        const double dz_dr = -via.depth * dshape_ds * ds_dr;
        const double dz_dphi = -via.depth * dshape_ds * ds_dphi;
        out.gradient = dz_dr * radial + (r > 0.0 ? dz_dphi / r : 0.0) * tangential;
        out.normal = Eigen::Vector3d(-out.gradient.x(), -out.gradient.y(), 1.0).normalized();
        return out;
    }
    return out;
}

DepthMap analytic_depth(const SceneSpec& scene) {
    scene.validate();
    DepthMap out{RasterD(scene.width, scene.height, 0.0), scene.pixel_pitch};
    for (std::size_t y = 0; y < scene.height; ++y) {
        for (std::size_t x = 0; x < scene.width; ++x) {
            out.z(x, y) = sample_surface(scene, static_cast<double>(x) * scene.pixel_pitch,
                                         static_cast<double>(y) * scene.pixel_pitch, 0.0)
                              .z;
        }
    }
    return out;
}

NormalField analytic_normals(const SceneSpec& scene) {
    scene.validate();
    const std::size_t w = scene.width;
    const std::size_t h = scene.height;
    NormalField out{Raster<Eigen::Vector3d>(w, h, Eigen::Vector3d::UnitZ()), RasterD(w, h, 0.0), Mask(w, h, 0),
                    RasterD(w, h, 0.0)};
    const double min_nz = std::cos(kMaxRecoverableWallDeg * std::numbers::pi / 180.0);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const auto s = sample_surface(scene, static_cast<double>(x) * scene.pixel_pitch,
                                          static_cast<double>(y) * scene.pixel_pitch, 0.5 * scene.pixel_pitch);
            if (s.vertical_wall || s.normal.z() < min_nz) continue;
            out.normals(x, y) = s.normal;
            out.albedo(x, y) = scene.albedo;
            out.mask(x, y) = 1;
        }
    }
    return out;
}

ImageStack render_scene(const SceneSpec& scene, const LightSet& lights, std::uint64_t seed) {
    scene.validate();
    const std::size_t w = scene.width;
    const std::size_t h = scene.height;
    ImageStack stack;
    stack.pixel_pitch = scene.pixel_pitch;
    stack.frames.assign(lights.size(), RasterD(w, h, 0.0));

    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double px = static_cast<double>(x) * scene.pixel_pitch;
            const double py = static_cast<double>(y) * scene.pixel_pitch;
            const auto s = sample_surface(scene, px, py, 0.5 * scene.pixel_pitch);
            for (std::size_t k = 0; k < lights.size(); ++k) {
                double shade = std::max(0.0, s.normal.dot(lights[k]));
                if (shade > 0.0 && scene.shadow_model == ShadowModel::Horizon && shadowed(scene, s, px, py, lights[k])) {
                    shade = 0.0;
                }
                stack.frames[k](x, y) = scene.albedo * shade;
            }
        }
    }
    if (scene.noise_sigma > 0.0) {
        std::mt19937_64 engine(seed);
        std::normal_distribution<double> noise(0.0, scene.noise_sigma);
        for (auto& frame : stack.frames) {
            for (double& v : frame.values()) v = std::clamp(v + noise(engine), 0.0, 1.0);
        }
    }
    return stack;
}

}  // namespace viascope
