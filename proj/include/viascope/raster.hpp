#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "viascope/error.hpp"

namespace viascope {

/// Dense row-major 2D grid. (x, y) index the column and row; y grows downward.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(std::size_t width, std::size_t height, T fill = T{})
        : width_(width), height_(height), data_(width * height, fill) {}

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
    const T& operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() & noexcept { return data_; }
    std::span<const T> values() const& noexcept { return data_; }
    std::vector<T> values() && noexcept { return std::move(data_); }

    bool same_shape(const Raster& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> data_;
};

using RasterD = Raster<double>;
using Mask = Raster<unsigned char>;

inline double raster_min(const RasterD& r) {
    if (r.empty()) throw Error(ErrorCode::EmptyRaster, "raster has no pixels");
    return *std::min_element(r.values().begin(), r.values().end());
}

inline double raster_max(const RasterD& r) {
    if (r.empty()) throw Error(ErrorCode::EmptyRaster, "raster has no pixels");
    return *std::max_element(r.values().begin(), r.values().end());
}

}  // namespace viascope
