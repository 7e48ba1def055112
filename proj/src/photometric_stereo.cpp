#include "viascope/photometric_stereo.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

namespace viascope {
namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kRankTolerance = 1e-8;
constexpr double kMinAlbedo = 1e-9;
constexpr std::size_t kMaxLights = 64;

bool full_rank(const Eigen::MatrixX3d& l) {
    if (l.rows() < 3) return false;
    Eigen::JacobiSVD<Eigen::MatrixX3d> svd(l);
    const auto& s = svd.singularValues();
    return s(0) > 0.0 && s(2) / s(0) > kRankTolerance;
}

// Pseudo-inverses of row subsets of the light matrix, keyed by the bitmask of
// rows used. Most pixels share one or two subsets.
class PseudoInverseCache {
public:
    explicit PseudoInverseCache(Eigen::MatrixX3d lights) : lights_(std::move(lights)) {}

    const std::optional<Eigen::Matrix3Xd>& get(std::uint64_t bits) {
        auto it = cache_.find(bits);
        if (it != cache_.end()) return it->second;

        const auto k = static_cast<Eigen::Index>(std::popcount(bits));
        Eigen::MatrixX3d sub(k, 3);
        Eigen::Index row = 0;
        for (Eigen::Index i = 0; i < lights_.rows(); ++i) {
            if (bits & (std::uint64_t{1} << i)) sub.row(row++) = lights_.row(i);
        }
        std::optional<Eigen::Matrix3Xd> pinv;
        if (full_rank(sub)) pinv = sub.completeOrthogonalDecomposition().pseudoInverse();
        return cache_.emplace(bits, std::move(pinv)).first->second;
    }

private:
    Eigen::MatrixX3d lights_;
    std::unordered_map<std::uint64_t, std::optional<Eigen::Matrix3Xd>> cache_;
};

}  // namespace

void ImageStack::validate() const {
    if (frames.size() < 3) {
        throw Error(ErrorCode::InvalidArgument,
                    "photometric stereo needs at least 3 images, got " + std::to_string(frames.size()));
    }
    if (!(pixel_pitch > 0.0) || !std::isfinite(pixel_pitch)) {
        throw Error(ErrorCode::InvalidArgument, "pixel pitch must be positive");
    }
    if (frames.front().empty()) throw Error(ErrorCode::EmptyRaster, "image stack frames are empty");
    for (const auto& frame : frames) {
        if (!frame.same_shape(frames.front())) {
            throw Error(ErrorCode::ShapeMismatch, "image stack frames differ in size");
        }
        for (double v : frame.values()) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                throw Error(ErrorCode::InvalidArgument, "intensity outside [0, 1]");
            }
        }
    }
}

LightSet LightSet::from_directions(std::vector<Eigen::Vector3d> directions) {
    for (const auto& d : directions) {
        if (!d.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite light direction");
        if (std::abs(d.norm() - 1.0) > kUnitTolerance) {
            throw Error(ErrorCode::InvalidArgument, "light direction is not unit length");
        }
        if (d.z() <= 0.0) throw Error(ErrorCode::BelowPlane, "light direction has lz <= 0");
    }
    LightSet set;
    set.directions_ = std::move(directions);
    return set;
}

Eigen::MatrixX3d LightSet::matrix() const {
    Eigen::MatrixX3d m(static_cast<Eigen::Index>(directions_.size()), 3);
    for (std::size_t i = 0; i < directions_.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = directions_[i].transpose();
    }
    return m;
}

LightSet normalize_lights(std::span<const Eigen::Vector3d> raw_positions) {
    if (raw_positions.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "at least 3 light positions are required");
    }
    std::vector<Eigen::Vector3d> dirs;
    dirs.reserve(raw_positions.size());
    for (const auto& pos : raw_positions) {
        const double norm = pos.norm();
        if (!(norm >= 1e-12)) throw Error(ErrorCode::ZeroVector, "light position has zero length");
        if (pos.z() <= 0.0) throw Error(ErrorCode::BelowPlane, "light position is not above the wafer plane");
        dirs.push_back(pos / norm);
    }
    return LightSet::from_directions(std::move(dirs));
}

void require_full_rank(const LightSet& lights) {
    if (!full_rank(lights.matrix())) {
        throw Error(ErrorCode::RankDeficientLights, "light directions are coplanar (rank < 3)");
    }
}

NormalField estimate_normals(const ImageStack& stack, const LightSet& lights, double shadow_threshold) {
    stack.validate();
    if (stack.count() != lights.size()) {
        throw Error(ErrorCode::ShapeMismatch, "image count " + std::to_string(stack.count()) +
                                                  " does not match light count " + std::to_string(lights.size()));
    }
    if (lights.size() > kMaxLights) throw Error(ErrorCode::InvalidArgument, "more than 64 lights");
    require_full_rank(lights);

    const std::size_t w = stack.width();
    const std::size_t h = stack.height();
    const std::size_t k = stack.count();

    NormalField out{Raster<Eigen::Vector3d>(w, h, Eigen::Vector3d::UnitZ()), RasterD(w, h, 0.0), Mask(w, h, 0),
                    RasterD(w, h, 0.0)};
    PseudoInverseCache pinv_cache(lights.matrix());
    Eigen::VectorXd intensities(static_cast<Eigen::Index>(k));

    for (std::size_t i = 0; i < w * h; ++i) {
        std::uint64_t usable = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double v = stack.frames[j][i];
            intensities(static_cast<Eigen::Index>(j)) = v;
            if (v > shadow_threshold) usable |= std::uint64_t{1} << j;
        }
        if (std::popcount(usable) < 3) continue;

        const auto& pinv = pinv_cache.get(usable);
        if (!pinv) continue;

        Eigen::VectorXd used(pinv->cols());
        Eigen::MatrixX3d used_lights(pinv->cols(), 3);
        Eigen::Index row = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (usable & (std::uint64_t{1} << j)) {
                used(row) = intensities(static_cast<Eigen::Index>(j));
                used_lights.row(row) = lights[j].transpose();
                ++row;
            }
        }
        const Eigen::Vector3d m = (*pinv) * used;
        const double rho = m.norm();
        if (!(rho >= kMinAlbedo)) continue;
        const Eigen::Vector3d n = m / rho;
        if (!(n.z() > 0.0)) continue;

        out.normals[i] = n;
        out.albedo[i] = rho;
        out.mask[i] = 1;
        out.residual[i] = std::sqrt((used_lights * m - used).squaredNorm() / static_cast<double>(row));
    }
    return out;
}

GradientField normals_to_gradients(const NormalField& field) {
    const std::size_t w = field.width();
    const std::size_t h = field.height();
    GradientField g{RasterD(w, h, 0.0), RasterD(w, h, 0.0), field.mask};
    for (std::size_t i = 0; i < w * h; ++i) {
        if (!field.mask[i]) continue;
        const auto& n = field.normals[i];
        g.p[i] = -n.x() / n.z();
        g.q[i] = -n.y() / n.z();
    }
    return g;
}

}  // namespace viascope
