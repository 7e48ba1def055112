#pragma once

#include "viascope/photometric_stereo.hpp"
#include "viascope/raster.hpp"

namespace viascope {

/// Height raster in micrometers. Vias are negative relative to the wafer
/// surface until `detrend` shifts the minimum to zero.
struct DepthMap {
    RasterD z;
    double pixel_pitch = 1.0;  // micrometers per pixel

    std::size_t width() const noexcept { return z.width(); }
    std::size_t height() const noexcept { return z.height(); }
};

/// dp/dx + dq/dy with central differences inside and one-sided differences
/// on the border, in pixel units.
RasterD divergence(const GradientField& grad);

/// Orthonormal 2D DCT-II and its inverse (DCT-III).
RasterD dct2(const RasterD& raster);
RasterD idct2(const RasterD& coefficients);

/// Solves the 5-point Poisson equation lap(z) = f with reflective (Neumann)
/// boundaries. The DC term is pinned to zero, so the discrete Laplacian of
/// the result equals f - mean(f).
RasterD poisson_solve(const RasterD& f);

/// 5-point Laplacian; border pixels use mirrored neighbours.
RasterD discrete_laplacian(const RasterD& z);

/// Removes the least-squares plane a*x + b*y + c and shifts min(z) to zero.
/// Only pixels with a nonzero `fit_mask` entry take part in the plane fit.
DepthMap detrend(const RasterD& z, double pixel_pitch);
DepthMap detrend(const RasterD& z, double pixel_pitch, const Mask& fit_mask);

/// divergence -> poisson_solve -> scale by pixel_pitch -> detrend.
/// Masked gradient pixels enter the solve as zero slope and are left out of
/// the plane fit.
DepthMap integrate(const GradientField& grad, double pixel_pitch);

}  // namespace viascope
