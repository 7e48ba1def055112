#include "viascope/depth_integration.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace viascope {
namespace {

// Row-major N x N orthonormal DCT-II matrix: C[k][n] = s_k cos(pi (2n + 1) k / 2N).
std::vector<double> dct_matrix(std::size_t n) {
    std::vector<double> c(n * n);
    const double dn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
        for (std::size_t i = 0; i < n; ++i) {
            c[k * n + i] = scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                                            static_cast<double>(k) / (2.0 * dn));
        }
    }
    return c;
}

enum class Direction { Forward, Inverse };

// Applies the 1D transform along x (rows) and then along y (columns).
RasterD separable_transform(const RasterD& in, Direction dir) {
    if (in.empty()) throw Error(ErrorCode::EmptyRaster, "cannot transform an empty raster");
    const std::size_t w = in.width();
    const std::size_t h = in.height();
    const auto cx = dct_matrix(w);
    const auto cy = dct_matrix(h);
    const bool fwd = dir == Direction::Forward;

    RasterD tmp(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t k = 0; k < w; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < w; ++i) {
                acc += (fwd ? cx[k * w + i] : cx[i * w + k]) * in(i, y);
            }
            tmp(k, y) = acc;
        }
    }
    RasterD out(w, h);
    std::vector<double> column(h);
    for (std::size_t x = 0; x < w; ++x) {
        for (std::size_t y = 0; y < h; ++y) column[y] = tmp(x, y);
        for (std::size_t k = 0; k < h; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < h; ++i) {
                acc += (fwd ? cy[k * h + i] : cy[i * h + k]) * column[i];
            }
            out(x, k) = acc;
        }
    }
    return out;
}

double axis_derivative(const RasterD& r, std::size_t x, std::size_t y, bool along_x) {
    const std::size_t n = along_x ? r.width() : r.height();
    const std::size_t i = along_x ? x : y;
    if (n < 2) return 0.0;
    auto at = [&](std::size_t j) { return along_x ? r(j, y) : r(x, j); };
    if (i == 0) return at(1) - at(0);
    if (i == n - 1) return at(n - 1) - at(n - 2);
    return 0.5 * (at(i + 1) - at(i - 1));
}

}  // namespace

RasterD divergence(const GradientField& grad) {
    if (!grad.p.same_shape(grad.q)) throw Error(ErrorCode::ShapeMismatch, "p and q differ in size");
    RasterD f(grad.p.width(), grad.p.height());
    for (std::size_t y = 0; y < f.height(); ++y) {
        for (std::size_t x = 0; x < f.width(); ++x) {
            f(x, y) = axis_derivative(grad.p, x, y, true) + axis_derivative(grad.q, x, y, false);
        }
    }
    return f;
}

RasterD dct2(const RasterD& raster) { return separable_transform(raster, Direction::Forward); }

RasterD idct2(const RasterD& coefficients) { return separable_transform(coefficients, Direction::Inverse); }

RasterD poisson_solve(const RasterD& f) {
    for (double v : f.values()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "Poisson right-hand side is not finite");
    }
    RasterD coeffs = dct2(f);
    const double w = static_cast<double>(f.width());
    const double h = static_cast<double>(f.height());
    for (std::size_t v = 0; v < f.height(); ++v) {
        for (std::size_t u = 0; u < f.width(); ++u) {
            if (u == 0 && v == 0) {
                coeffs(0, 0) = 0.0;
                continue;
            }
            const double eig = 2.0 * std::cos(std::numbers::pi * static_cast<double>(u) / w) +
                               2.0 * std::cos(std::numbers::pi * static_cast<double>(v) / h) - 4.0;
            coeffs(u, v) /= eig;
        }
    }
    return idct2(coeffs);
}

RasterD discrete_laplacian(const RasterD& z) {
    const std::size_t w = z.width();
    const std::size_t h = z.height();
    RasterD out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double c = z(x, y);
            const double left = x > 0 ? z(x - 1, y) : c;
            const double right = x + 1 < w ? z(x + 1, y) : c;
            const double up = y > 0 ? z(x, y - 1) : c;
            const double down = y + 1 < h ? z(x, y + 1) : c;
            out(x, y) = left + right + up + down - 4.0 * c;
        }
    }
    return out;
}

DepthMap detrend(const RasterD& z, double pixel_pitch) {
    return detrend(z, pixel_pitch, Mask(z.width(), z.height(), 1));
}

DepthMap detrend(const RasterD& z, double pixel_pitch, const Mask& fit_mask) {
    if (z.empty()) throw Error(ErrorCode::EmptyRaster, "cannot detrend an empty raster");
    if (!fit_mask.same_shape(Mask(z.width(), z.height()))) {
        throw Error(ErrorCode::ShapeMismatch, "fit mask differs in size from the depth raster");
    }
    for (double v : z.values()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "depth raster is not finite");
    }

    // Centered coordinates keep the normal equations well conditioned.
    const double cx = 0.5 * static_cast<double>(z.width() - 1);
    const double cy = 0.5 * static_cast<double>(z.height() - 1);
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (std::size_t y = 0; y < z.height(); ++y) {
        for (std::size_t x = 0; x < z.width(); ++x) {
            if (!fit_mask(x, y)) continue;
            const Eigen::Vector3d row(static_cast<double>(x) - cx, static_cast<double>(y) - cy, 1.0);
            ata += row * row.transpose();
            atb += row * z(x, y);
        }
    }
    const Eigen::ColPivHouseholderQR<Eigen::Matrix3d> qr(ata);
    if (qr.rank() < 3 || ata(2, 2) < 3.0) {
        throw Error(ErrorCode::DegenerateFit, "plane fit needs at least 3 non-collinear pixels");
    }
    const Eigen::Vector3d plane = qr.solve(atb);

    DepthMap out{RasterD(z.width(), z.height()), pixel_pitch};
    for (std::size_t y = 0; y < z.height(); ++y) {
        for (std::size_t x = 0; x < z.width(); ++x) {
            out.z(x, y) = z(x, y) - (plane(0) * (static_cast<double>(x) - cx) +
                                     plane(1) * (static_cast<double>(y) - cy) + plane(2));
        }
    }
    const double lowest = raster_min(out.z);
    for (double& v : out.z.values()) v -= lowest;
    return out;
}

DepthMap integrate(const GradientField& grad, double pixel_pitch) {
    if (!(pixel_pitch > 0.0) || !std::isfinite(pixel_pitch)) {
        throw Error(ErrorCode::InvalidArgument, "pixel pitch must be positive");
    }
    RasterD z = poisson_solve(divergence(grad));
    for (double& v : z.values()) v *= pixel_pitch;
    return detrend(z, pixel_pitch, grad.mask);
}

}  // namespace viascope
