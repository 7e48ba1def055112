#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "viascope/depth_integration.hpp"
#include "viascope/photometric_stereo.hpp"

namespace viascope {

/// Binary PGM (P5). 8-bit and 16-bit (big-endian) samples are accepted and
/// scaled to [0, 1] by 1 / maxval.
RasterD read_pgm(std::istream& in);
RasterD load_pgm(const std::filesystem::path& path);

/// 16-bit P5 with maxval 65535; intensities are clamped to [0, 1] and rounded.
void write_pgm16(std::ostream& out, const RasterD& intensities);
void save_pgm16(const std::filesystem::path& path, const RasterD& intensities);

/// Loads >= 3 frames of identical size into a stack.
ImageStack load_image_stack(std::span<const std::filesystem::path> paths, double pixel_pitch);

// FDM1 depth format:
//   FDM1\n
//   width <int>\n
//   height <int>\n
//   pitch_um <decimal>\n
//   width * height little-endian float32, row-major, y down.
void write_depth_map(std::ostream& out, const DepthMap& map);
DepthMap read_depth_map(std::istream& in);
void save_depth_map(const std::filesystem::path& path, const DepthMap& map);
DepthMap load_depth_map(const std::filesystem::path& path);

/// Shortest decimal that parses back to the same double.
std::string format_shortest(double value);

/// Writes `bytes` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace viascope
