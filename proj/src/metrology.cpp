#include "viascope/metrology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

namespace viascope {
namespace {

constexpr int kMaxGaussNewtonSteps = 50;
constexpr double kStepTolerance = 1e-12;
constexpr double kObjectiveSlack = 1e-12;  // rounding noise in the objective sum
constexpr std::size_t kHistogramBins = 256;

// Points shifted to their centroid and scaled to unit RMS radius, so the fits
// are translation and scale equivariant.
struct Normalized {
    std::vector<Point2> points;
    double mx = 0.0;
    double my = 0.0;
    double scale = 1.0;

    Circle to_world(const Circle& c) const { return {c.cx * scale + mx, c.cy * scale + my, c.r * scale}; }
};

Normalized normalize(std::span<const Point2> points) {
    if (points.size() < 3) {
        throw Error(ErrorCode::TooFewPoints, "circle fit needs at least 3 points, got " + std::to_string(points.size()));
    }
    Normalized n;
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::InvalidArgument, "non-finite point");
        n.mx += p.x;
        n.my += p.y;
    }
    n.mx /= static_cast<double>(points.size());
    n.my /= static_cast<double>(points.size());
    double ss = 0.0;
    for (const auto& p : points) ss += (p.x - n.mx) * (p.x - n.mx) + (p.y - n.my) * (p.y - n.my);
    n.scale = std::sqrt(ss / static_cast<double>(points.size()));
    if (!(n.scale > 0.0)) throw Error(ErrorCode::CollinearPoints, "all points coincide");
    n.points.reserve(points.size());
    for (const auto& p : points) n.points.push_back({(p.x - n.mx) / n.scale, (p.y - n.my) / n.scale});
    return n;
}

Circle algebraic_unit(std::span<const Point2> pts) {
    const auto rows = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixX3d a(rows, 3);
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& p = pts[static_cast<std::size_t>(i)];
        a.row(i) << p.x, p.y, 1.0;
        b(i) = -(p.x * p.x + p.y * p.y);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixX3d> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) throw Error(ErrorCode::CollinearPoints, "points are collinear");
    const Eigen::Vector3d sol = qr.solve(b);
    Circle c{-0.5 * sol(0), -0.5 * sol(1), 0.0};
    const double r2 = c.cx * c.cx + c.cy * c.cy - sol(2);
    if (!(r2 > 0.0) || !std::isfinite(r2)) throw Error(ErrorCode::CollinearPoints, "points are collinear");
    c.r = std::sqrt(r2);
    return c;
}

double percentile(std::vector<double> values, double pct) {
    std::sort(values.begin(), values.end());
    const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return values[lo] + t * (values[hi] - values[lo]);
}

// --- marching squares ------------------------------------------------------

struct Segment {
    std::array<std::uint64_t, 2> edges;
    std::array<Point2, 2> points;
};

struct ContourTrace {
    std::vector<Point2> points;
    bool closed = false;
    double length = 0.0;
};

std::vector<Segment> march(const RasterD& z, double iso) {
    const std::size_t w = z.width();
    const std::size_t h = z.height();
    std::vector<Segment> segments;
    if (w < 2 || h < 2) return segments;

    for (std::size_t y = 0; y + 1 < h; ++y) {
        for (std::size_t x = 0; x + 1 < w; ++x) {
            const std::array<double, 4> v = {z(x, y), z(x + 1, y), z(x + 1, y + 1), z(x, y + 1)};
            const std::array<bool, 4> in = {v[0] < iso, v[1] < iso, v[2] < iso, v[3] < iso};
            if (in[0] == in[1] && in[1] == in[2] && in[2] == in[3]) continue;

            // Edges: 0 top (c0-c1), 1 right (c1-c2), 2 bottom (c3-c2), 3 left (c0-c3).
            const std::array<std::array<int, 2>, 4> corners = {{{0, 1}, {1, 2}, {3, 2}, {0, 3}}};
            const std::array<std::uint64_t, 4> ids = {
                2 * (y * w + x), 2 * (y * w + x + 1) + 1, 2 * ((y + 1) * w + x), 2 * (y * w + x) + 1};
            const std::array<Point2, 4> pos = {Point2{double(x), double(y)}, Point2{double(x + 1), double(y)},
                                               Point2{double(x + 1), double(y + 1)}, Point2{double(x), double(y + 1)}};
            auto crossing = [&](int e) {
                const int a = corners[static_cast<std::size_t>(e)][0];
                const int b = corners[static_cast<std::size_t>(e)][1];
                const double t = (iso - v[static_cast<std::size_t>(a)]) /
                                 (v[static_cast<std::size_t>(b)] - v[static_cast<std::size_t>(a)]);
                const auto& pa = pos[static_cast<std::size_t>(a)];
                const auto& pb = pos[static_cast<std::size_t>(b)];
                return Point2{pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y)};
            };
            auto add = [&](int e0, int e1) {
                segments.push_back({{ids[static_cast<std::size_t>(e0)], ids[static_cast<std::size_t>(e1)]},
                                    {crossing(e0), crossing(e1)}});
            };

            std::vector<int> crossed;
            for (int e = 0; e < 4; ++e) {
                const auto& c = corners[static_cast<std::size_t>(e)];
                if (in[static_cast<std::size_t>(c[0])] != in[static_cast<std::size_t>(c[1])]) crossed.push_back(e);
            }
            if (crossed.size() == 2) {
                add(crossed[0], crossed[1]);
                continue;
            }
            // Saddle: the cell-center average decides which diagonal connects.
            const bool center_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) < iso;
            // Corner k touches edges (k, k-1 mod 4): c0 {0,3}, c1 {0,1}, c2 {1,2}, c3 {2,3}.
            for (int k = 0; k < 4; ++k) {
                if (in[static_cast<std::size_t>(k)] != center_in) add(k, (k + 3) % 4);
            }
        }
    }
    return segments;
}

double dist(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<ContourTrace> link(const std::vector<Segment>& segments) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_edge;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        for (auto e : segments[i].edges) by_edge[e].push_back(i);
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<ContourTrace> traces;

    // Follows segments from `edge`, appending the far endpoint of each step.
    auto walk = [&](std::uint64_t edge, std::vector<Point2>& out) -> std::uint64_t {
        while (true) {
            std::size_t next = segments.size();
            for (auto s : by_edge[edge]) {
                if (!used[s]) {
                    next = s;
                    break;
                }
            }
            if (next == segments.size()) return edge;
            used[next] = true;
            const auto& seg = segments[next];
            const int far = seg.edges[0] == edge ? 1 : 0;
            out.push_back(seg.points[static_cast<std::size_t>(far)]);
            edge = seg.edges[static_cast<std::size_t>(far)];
        }
    };

    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const auto& seg = segments[i];
        std::vector<Point2> forward{seg.points[0], seg.points[1]};
        const std::uint64_t end = walk(seg.edges[1], forward);

        ContourTrace trace;
        if (end == seg.edges[0]) {
            forward.pop_back();  // the walk came back to the starting point
            trace.closed = true;
            trace.points = std::move(forward);
        } else {
            std::vector<Point2> backward;
            walk(seg.edges[0], backward);
            std::reverse(backward.begin(), backward.end());
            backward.insert(backward.end(), forward.begin(), forward.end());
            trace.points = std::move(backward);
        }
        for (std::size_t j = 1; j < trace.points.size(); ++j) trace.length += dist(trace.points[j - 1], trace.points[j]);
        if (trace.closed && trace.points.size() > 1) trace.length += dist(trace.points.back(), trace.points.front());
        traces.push_back(std::move(trace));
    }
    return traces;
}

}  // namespace

Circle fit_circle_algebraic(std::span<const Point2> points) {
    const Normalized n = normalize(points);
    return n.to_world(algebraic_unit(n.points));
}

double lsc_objective(std::span<const Point2> points, const Circle& circle) {
    double sum = 0.0;
    for (const auto& p : points) {
        const double e = std::hypot(p.x - circle.cx, p.y - circle.cy) - circle.r;
        sum += e * e;
    }
    return sum;
}

Circle fit_lsc(std::span<const Point2> points) {
    const Normalized n = normalize(points);
    Circle c = algebraic_unit(n.points);
    double objective = lsc_objective(n.points, c);

    const auto rows = static_cast<Eigen::Index>(n.points.size());
    Eigen::MatrixX3d jac(rows, 3);
    Eigen::VectorXd res(rows);
    for (int iter = 0; iter < kMaxGaussNewtonSteps; ++iter) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto& p = n.points[static_cast<std::size_t>(i)];
            const double dx = p.x - c.cx;
            const double dy = p.y - c.cy;
            const double d = std::hypot(dx, dy);
            if (d > 0.0) {
                jac.row(i) << -dx / d, -dy / d, -1.0;
            } else {
                jac.row(i) << 0.0, 0.0, -1.0;
            }
            res(i) = d - c.r;
        }
        const Eigen::Vector3d step = jac.colPivHouseholderQr().solve(-res);
        if (!step.allFinite()) break;

        Circle trial{c.cx + step(0), c.cy + step(1), c.r + step(2)};
        const double trial_objective = lsc_objective(n.points, trial);
        if (!(trial_objective <= objective * (1.0 + kObjectiveSlack)) || !(trial.r > 0.0)) break;
        c = trial;
        objective = trial_objective;
        if (step.norm() < kStepTolerance) break;
    }
    return n.to_world(c);
}

double roundness(std::span<const Point2> points, const Circle& circle) {
    if (points.size() < 3) throw Error(ErrorCode::TooFewPoints, "roundness needs at least 3 points");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : points) {
        const double d = std::hypot(p.x - circle.cx, p.y - circle.cy);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi - lo;
}

double surface_reference(const DepthMap& map) {
    const double lo = raster_min(map.z);
    const double hi = raster_max(map.z);
    if (!(hi > lo)) return lo;
    const double width = (hi - lo) / static_cast<double>(kHistogramBins);
    auto bin_of = [&](double v) {
        return std::min(kHistogramBins - 1, static_cast<std::size_t>((v - lo) / width));
    };
    std::array<std::size_t, kHistogramBins> counts{};
    for (double v : map.z.values()) ++counts[bin_of(v)];
    const auto peak = static_cast<std::size_t>(std::distance(counts.begin(), std::max_element(counts.begin(), counts.end())));
    std::vector<double> in_peak;
    in_peak.reserve(counts[peak]);
    for (double v : map.z.values()) {
        if (bin_of(v) == peak) in_peak.push_back(v);
    }
    std::sort(in_peak.begin(), in_peak.end());
    double sum = 0.0;
    for (double v : in_peak) sum += v;
    return sum / static_cast<double>(in_peak.size());
}

std::vector<Point2> extract_slice_contour(const DepthMap& map, double level) {
    const double ref = surface_reference(map);
    const double iso = ref - level;
    if (!(level > 0.0) || !(iso > raster_min(map.z))) {
        throw Error(ErrorCode::NoContour, "slice level lies outside the depth range");
    }
    const auto traces = link(march(map.z, iso));
    const ContourTrace* best = nullptr;
    bool any_open = false;
    for (const auto& t : traces) {
        if (!t.closed) {
            any_open = true;
            continue;
        }
        if (t.points.size() < 3) continue;
        if (best == nullptr || t.length > best->length) best = &t;
    }
    if (best == nullptr) {
        if (any_open) throw Error(ErrorCode::OpenContourOnly, "the via contour is cut by the image border");
        throw Error(ErrorCode::NoContour, "no closed contour at this level");
    }
    std::vector<Point2> out;
    out.reserve(best->points.size());
    for (const auto& p : best->points) out.push_back({p.x * map.pixel_pitch, p.y * map.pixel_pitch});
    return out;
}

SliceProfile measure_slice(const DepthMap& map, double level) {
    const auto contour = extract_slice_contour(map, level);
    SliceProfile profile;
    profile.level = level;
    profile.circle = fit_lsc(contour);
    profile.roundness = roundness(contour, profile.circle);
    profile.point_count = contour.size();
    return profile;
}

ViaMeasurement measure_via(const DepthMap& map, int slice_count) {
    if (slice_count < 1) throw Error(ErrorCode::InvalidArgument, "slice_count must be at least 1");
    const double ref = surface_reference(map);
    const double range = ref - raster_min(map.z);

    std::vector<double> deviations;
    deviations.reserve(map.z.size());
    for (double v : map.z.values()) deviations.push_back(std::abs(v - ref));
    const double noise_sigma = 1.4826 * percentile(std::move(deviations), 50.0);
    if (!(range > 3.0 * noise_sigma) || !(range > 1e-9)) {
        throw Error(ErrorCode::NoVia, "depth range is within the surface noise floor");
    }

    std::vector<double> floor_values;
    for (double v : map.z.values()) {
        if (v < ref - 0.5 * range) floor_values.push_back(v);
    }
    ViaMeasurement out;
    out.depth = ref - percentile(std::move(floor_values), kDepthFloorPercentile);
    if (!(out.depth > 0.0)) throw Error(ErrorCode::NoVia, "measured depth is not positive");

    out.diameter = 2.0 * measure_slice(map, kDiameterLevelFraction * out.depth).circle.r;

    const double bin = 0.90 / static_cast<double>(slice_count);
    for (int i = 0; i < slice_count; ++i) {
        const double fraction = 0.05 + (static_cast<double>(i) + 0.5) * bin;
        out.profiles.push_back(measure_slice(map, fraction * out.depth));
    }
    return out;
}

ComparisonReport compare_to_reference(std::span<const ViaMeasurement> measured,
                                      std::span<const ReferenceValues> reference) {
    if (measured.size() != reference.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(measured.size()) + " measurements vs " +
                                                   std::to_string(reference.size()) + " references");
    }
    ComparisonReport report;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const auto& ref = reference[i];
        if (!(ref.depth > 0.0) || !(ref.diameter > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "reference values must be positive");
        }
        ComparisonRow row;
        row.ref_depth = ref.depth;
        row.meas_depth = measured[i].depth;
        row.depth_err = row.meas_depth - row.ref_depth;
        row.depth_err_pct = 100.0 * row.depth_err / row.ref_depth;
        row.ref_diameter = ref.diameter;
        row.meas_diameter = measured[i].diameter;
        row.diameter_err = row.meas_diameter - row.ref_diameter;
        row.diameter_err_pct = 100.0 * row.diameter_err / row.ref_diameter;
        report.depth_mape += std::abs(row.depth_err_pct);
        report.diameter_mape += std::abs(row.diameter_err_pct);
        report.rows.push_back(row);
    }
    if (!report.rows.empty()) {
        report.depth_mape /= static_cast<double>(report.rows.size());
        report.diameter_mape /= static_cast<double>(report.rows.size());
    }
    return report;
}

}  // namespace viascope
