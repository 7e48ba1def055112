#include "viascope/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace viascope {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string token;
    int c = 0;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n' && c != '\r') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!token.empty()) break;
            continue;
        }
        token.push_back(static_cast<char>(c));
    }
    if (token.empty()) throw Error(ErrorCode::MalformedHeader, "PGM header ends early");
    return token;
}

long parse_long(const std::string& token, ErrorCode code, const char* what) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw Error(code, std::string("cannot parse ") + what + " '" + token + "'");
    }
    return value;
}

std::string header_line(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedHeader, "FDM1 header ends early");
    return line;
}

std::string header_field(std::istream& in, std::string_view key) {
    const std::string line = header_line(in);
    if (line.size() <= key.size() + 1 || line.compare(0, key.size(), key) != 0 || line[key.size()] != ' ') {
        throw Error(ErrorCode::MalformedHeader, "expected '" + std::string(key) + " <value>', got '" + line + "'");
    }
    return line.substr(key.size() + 1);
}

std::ifstream open_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    return in;
}

}  // namespace

RasterD read_pgm(std::istream& in) {
    if (pgm_token(in) != "P5") throw Error(ErrorCode::MalformedHeader, "not a binary PGM (P5)");
    const long width = parse_long(pgm_token(in), ErrorCode::MalformedHeader, "width");
    const long height = parse_long(pgm_token(in), ErrorCode::MalformedHeader, "height");
    const long maxval = parse_long(pgm_token(in), ErrorCode::MalformedHeader, "maxval");
    if (width <= 0 || height <= 0) throw Error(ErrorCode::MalformedHeader, "PGM dimensions must be positive");
    if (maxval < 1 || maxval > 65535) {
        throw Error(ErrorCode::UnsupportedMaxval, "maxval " + std::to_string(maxval) + " outside 1..65535");
    }
    // pgm_token consumed exactly one whitespace byte after maxval.
    const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<unsigned char> buf(count * bytes_per_sample);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
        throw Error(ErrorCode::TruncatedPayload, "PGM raster is shorter than its header declares");
    }
    RasterD out(static_cast<std::size_t>(width), static_cast<std::size_t>(height));
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned sample = bytes_per_sample == 1 ? buf[i] : (unsigned{buf[2 * i]} << 8) | buf[2 * i + 1];
        if (sample > static_cast<unsigned>(maxval)) {
            throw Error(ErrorCode::InvalidArgument, "PGM sample exceeds maxval");
        }
        out[i] = static_cast<double>(sample) * scale;
    }
    return out;
}

RasterD load_pgm(const std::filesystem::path& path) {
    auto in = open_binary(path);
    try {
        return read_pgm(in);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_pgm16(std::ostream& out, const RasterD& intensities) {
    out << "P5\n" << intensities.width() << ' ' << intensities.height() << "\n65535\n";
    std::string payload(intensities.size() * 2, '\0');
    for (std::size_t i = 0; i < intensities.size(); ++i) {
        const double v = std::clamp(intensities[i], 0.0, 1.0);
        const auto s = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        payload[2 * i] = static_cast<char>(s >> 8);
        payload[2 * i + 1] = static_cast<char>(s & 0xff);
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

void save_pgm16(const std::filesystem::path& path, const RasterD& intensities) {
    std::ostringstream os(std::ios::binary);
    write_pgm16(os, intensities);
    write_file_atomic(path, os.str());
}

ImageStack load_image_stack(std::span<const std::filesystem::path> paths, double pixel_pitch) {
    if (paths.size() < 3) {
        throw Error(ErrorCode::InvalidArgument,
                    "photometric stereo needs at least 3 images, got " + std::to_string(paths.size()));
    }
    ImageStack stack;
    stack.pixel_pitch = pixel_pitch;
    for (const auto& p : paths) {
        stack.frames.push_back(load_pgm(p));
        if (!stack.frames.back().same_shape(stack.frames.front())) {
            throw Error(ErrorCode::DimensionMismatch, p.string() + " differs in size from " + paths[0].string());
        }
    }
    stack.validate();
    return stack;
}

std::string format_shortest(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

void write_depth_map(std::ostream& out, const DepthMap& map) {
    out << "FDM1\nwidth " << map.width() << "\nheight " << map.height() << "\npitch_um "
        << format_shortest(map.pixel_pitch) << '\n';
    std::string payload(map.z.size() * 4, '\0');
    for (std::size_t i = 0; i < map.z.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(map.z[i]));
        for (std::size_t b = 0; b < 4; ++b) payload[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

DepthMap read_depth_map(std::istream& in) {
    std::string magic;
    if (!std::getline(in, magic) || magic != "FDM1") throw Error(ErrorCode::BadMagic, "missing FDM1 magic");
    const long width = parse_long(header_field(in, "width"), ErrorCode::MalformedHeader, "width");
    const long height = parse_long(header_field(in, "height"), ErrorCode::MalformedHeader, "height");
    const std::string pitch_text = header_field(in, "pitch_um");
    double pitch = 0.0;
    const auto [ptr, ec] = std::from_chars(pitch_text.data(), pitch_text.data() + pitch_text.size(), pitch);
    if (ec != std::errc() || ptr != pitch_text.data() + pitch_text.size() || !(pitch > 0.0) || !std::isfinite(pitch)) {
        throw Error(ErrorCode::MalformedHeader, "bad pitch_um '" + pitch_text + "'");
    }
    if (width <= 0 || height <= 0) throw Error(ErrorCode::MalformedHeader, "FDM1 dimensions must be positive");

    DepthMap map{RasterD(static_cast<std::size_t>(width), static_cast<std::size_t>(height)), pitch};
    std::vector<unsigned char> buf(map.z.size() * 4);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
        throw Error(ErrorCode::TruncatedPayload, "FDM1 payload holds fewer than width*height floats");
    }
    if (in.peek() != EOF) throw Error(ErrorCode::MalformedHeader, "trailing bytes after FDM1 payload");
    for (std::size_t i = 0; i < map.z.size(); ++i) {
        std::uint32_t bits = 0;
        for (std::size_t b = 0; b < 4; ++b) bits |= std::uint32_t{buf[4 * i + b]} << (8 * b);
        const float v = std::bit_cast<float>(bits);
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "FDM1 payload holds a non-finite value");
        map.z[i] = v;
    }
    return map;
}

void save_depth_map(const std::filesystem::path& path, const DepthMap& map) {
    std::ostringstream os(std::ios::binary);
    write_depth_map(os, map);
    write_file_atomic(path, os.str());
}

DepthMap load_depth_map(const std::filesystem::path& path) {
    auto in = open_binary(path);
    try {
        return read_depth_map(in);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error(ErrorCode::IoFailure, "short write to " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoFailure, "cannot replace " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    auto in = open_binary(path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace viascope
