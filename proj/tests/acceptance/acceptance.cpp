// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "viascope/cli.hpp"
#include "viascope/depth_integration.hpp"
#include "viascope/illumination.hpp"
#include "viascope/io.hpp"
#include "viascope/leveling.hpp"
#include "viascope/metrology.hpp"
#include "viascope/report.hpp"
#include "viascope/synthetic.hpp"

using namespace viascope;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Zenith light plus a ring of `ring` lights tilted `tilt_deg` from the axis.
std::vector<Eigen::Vector3d> ring_lights(int ring, double tilt_deg) {
    std::vector<Eigen::Vector3d> out{Eigen::Vector3d::UnitZ()};
    const double t = tilt_deg * kPi / 180.0;
    for (int i = 0; i < ring; ++i) {
        const double a = 2.0 * kPi * i / ring;
        out.emplace_back(std::sin(t) * std::cos(a), std::sin(t) * std::sin(a), std::cos(t));
    }
    return out;
}

const std::vector<Eigen::Vector3d> kSevenLights = ring_lights(6, 3.0);
const std::vector<Eigen::Vector3d> kFiveLights = ring_lights(4, 4.0);

class Workspace {
public:
    Workspace() {
        std::random_device rd;
        root_ = fs::temp_directory_path() / ("viascope_acceptance_" + std::to_string(rd()));
        fs::create_directories(root_);
    }
    ~Workspace() {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }
    fs::path dir(const std::string& name) const {
        fs::create_directories(root_ / name);
        return root_ / name;
    }

private:
    fs::path root_;
};

void write_text(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string lights_json(const std::vector<Eigen::Vector3d>& lights) {
    std::string s = "{\"kind\": \"directions\", \"lights\": [";
    for (std::size_t i = 0; i < lights.size(); ++i) {
        s += fmt("%s[%.17g, %.17g, %.17g]", i ? ", " : "", lights[i].x(), lights[i].y(), lights[i].z());
    }
    return s + "]}";
}

const char* kTaperScene = R"({"width": 256, "height": 256, "pixel_pitch_um": 0.5, "albedo": 0.8,
  "vias": [{"center_um": [64, 64], "radius_top_um": 25, "radius_bottom_um": 23, "depth_um": 50,
            "wall_profile": "straight-taper"}]})";

void cli_or_throw(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    if (code != kExitOk) throw std::runtime_error(args[0] + " exited " + std::to_string(code) + ": " + err.str());
}

struct ChainResult {
    double depth = 0.0;
    double diameter = 0.0;
};

// render -> reconstruct -> level -> inspect through the command-line front end.
ChainResult run_chain(const fs::path& dir, const std::vector<Eigen::Vector3d>& lights, double noise,
                      std::uint64_t seed) {
    write_text(dir / "scene.json", kTaperScene);
    write_text(dir / "lights.json", lights_json(lights));
    cli_or_throw({"render", (dir / "scene.json").string(), "--lights", (dir / "lights.json").string(), "--out-dir",
                  dir.string(), "--noise", fmt("%.17g", noise), "--seed", std::to_string(seed)});
    std::vector<std::string> rec{"reconstruct", "--lights", (dir / "lights.json").string(), "--pitch", "0.5", "--out",
                                 (dir / "depth.fdm1").string()};
    for (std::size_t k = 0; k < lights.size(); ++k) rec.push_back((dir / fmt("frame_%03zu.pgm", k)).string());
    cli_or_throw(rec);
    cli_or_throw({"level", "--spatial-sigma", "1", "--depth-sigma", "50", "--in", (dir / "depth.fdm1").string(), "--out",
                  (dir / "level.fdm1").string()});
    cli_or_throw({"inspect", "--slices", "10", "--in", (dir / "level.fdm1").string(), "--out",
                  (dir / "metrics.csv").string()});
    const auto summary = parse_summary_csv(read_file(dir / "metrics.summary.csv"));
    return {summary.at(0).depth, summary.at(0).diameter};
}

// 1. Noiseless normal round trip on a 2x2 via array under seven lights.
Outcome noiseless_round_trip() {
    SceneSpec scene;
    scene.width = scene.height = 512;
    scene.pixel_pitch = 0.5;
    scene.albedo = 0.8;
    scene.vias = {{64, 64, 40, 20, 50, WallProfile::StraightTaper, 0.0},
                  {192, 64, 40, 15, 30, WallProfile::CosineRoundedRim, 0.0},
                  {64, 192, 40, 25, 30, WallProfile::StraightTaper, 3.0},
                  {192, 192, 30, 28, 40, WallProfile::StraightTaper, 0.0}};
    const auto lights = LightSet::from_directions(kSevenLights);
    const auto stack = render_scene(scene, lights, 0);
    const auto truth = analytic_normals(scene);

    const auto t0 = std::chrono::steady_clock::now();
    const auto field = estimate_normals(stack, lights);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    double worst_angle = 0.0;
    double worst_albedo = 0.0;
    std::size_t checked = 0;
    bool all_valid = true;
    for (std::size_t i = 0; i < truth.mask.size(); ++i) {
        if (!truth.mask[i]) continue;
        bool lit = true;
        for (const auto& f : stack.frames) lit = lit && f[i] > kDefaultShadowThreshold;
        if (!lit) continue;
        ++checked;
        if (!field.mask[i]) {
            all_valid = false;
            continue;
        }
        const auto& n = field.normals[i];
        const auto& t = truth.normals[i];
        worst_angle = std::max(worst_angle, std::atan2(n.cross(t).norm(), n.dot(t)));
        worst_albedo = std::max(worst_albedo, std::abs(field.albedo[i] - scene.albedo) / scene.albedo);
    }
    return {all_valid && checked > 100000 && worst_angle < 1e-5 && worst_albedo < 1e-6 && seconds < 10.0,
            fmt("%zu lit pixels, max angle %.2e rad, max albedo rel %.2e, estimate_normals %.2f s at 512x512", checked,
                worst_angle, worst_albedo, seconds)};
}

// 2. Depth and diameter of a straight-taper via through the full pipeline.
Outcome depth_accuracy(const Workspace& ws) {
    bool pass = true;
    std::string detail;
    const auto check = [&](const char* label, const std::vector<Eigen::Vector3d>& lights, double noise,
                           std::uint64_t seed, double tol) {
        const auto dir = ws.dir(fmt("c2_%s_%g_%llu", label, noise, static_cast<unsigned long long>(seed)));
        const auto r = run_chain(dir, lights, noise, seed);
        const double de = 100.0 * (r.depth - 50.0) / 50.0;
        const double me = 100.0 * (r.diameter - 50.0) / 50.0;
        const bool ok = std::abs(de) <= tol && std::abs(me) <= tol;
        pass = pass && ok;
        detail += fmt("\n    %-7s noise %-5g seed %llu: depth %.3f (%+.2f%%) diameter %.3f (%+.2f%%) limit %g%% %s", label,
                      noise, static_cast<unsigned long long>(seed), r.depth, de, r.diameter, me, tol, ok ? "ok" : "OUT");
    };
    for (auto [label, lights] : {std::pair{"7-light", &kSevenLights}, std::pair{"5-light", &kFiveLights}}) {
        check(label, *lights, 0.0, 0, 3.0);
        for (std::uint64_t seed : {1, 2, 3}) check(label, *lights, 0.01, seed, 6.0);
    }
    return {pass, detail};
}

// 3. Poisson solve of an analytic spherical cap.
Outcome poisson_cap() {
    const std::size_t n = 128;
    const double radius = 60.0;
    const double base = 40.0;
    const double c = 63.5;
    const double height = radius - std::sqrt(radius * radius - base * base);
    GradientField g{RasterD(n, n, 0.0), RasterD(n, n, 0.0), Mask(n, n, 1)};
    RasterD truth(n, n, 0.0);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            const double dx = static_cast<double>(x) - c;
            const double dy = static_cast<double>(y) - c;
            const double r2 = dx * dx + dy * dy;
            if (r2 >= base * base) continue;
            const double s = std::sqrt(radius * radius - r2);
            g.p(x, y) = -dx / s;
            g.q(x, y) = -dy / s;
            truth(x, y) = s - std::sqrt(radius * radius - base * base);
        }
    }
    const auto f = divergence(g);
    const auto z = poisson_solve(f);

    // Optimal plane/offset alignment by least squares on the difference.
    Eigen::MatrixX3d a(static_cast<Eigen::Index>(n * n), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(n * n));
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            const auto i = static_cast<Eigen::Index>(y * n + x);
            a.row(i) << static_cast<double>(x), static_cast<double>(y), 1.0;
            b(i) = z(x, y) - truth(x, y);
        }
    }
    const Eigen::Vector3d plane = a.colPivHouseholderQr().solve(b);
    const double rms = std::sqrt((b - a * plane).squaredNorm() / static_cast<double>(n * n));

    const auto lap = discrete_laplacian(z);
    double residual = 0.0;
    for (std::size_t y = 1; y + 1 < n; ++y) {
        for (std::size_t x = 1; x + 1 < n; ++x) residual = std::max(residual, std::abs(lap(x, y) - f(x, y)));
    }
    return {rms < 0.005 * height && residual < 1e-8,
            fmt("cap height %.3f px, aligned RMS %.4f px (%.3f%%), max interior Laplacian residual %.2e", height, rms,
                100.0 * rms / height, residual)};
}

// 4. DCT round trip on random rasters.
Outcome dct_round_trip() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> dim(1, 48);
    std::uniform_real_distribution<double> val(-1000.0, 1000.0);
    double worst = 0.0;
    int thin = 0;
    for (int t = 0; t < 100; ++t) {
        std::size_t w = dim(rng);
        std::size_t h = dim(rng);
        if (t % 4 == 0) w = 1;
        if (t % 4 == 1) h = 1;
        thin += (w == 1 || h == 1) ? 1 : 0;
        RasterD x(w, h);
        for (double& v : x.values()) v = val(rng);
        const auto back = idct2(dct2(x));
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(back[i] - x[i]));
    }
    return {worst <= 1e-10, fmt("100 rasters (%d of shape 1xN or Nx1), max |idct2(dct2(X)) - X| = %.2e", thin, worst)};
}

double roundness_spread(double rim_amplitude) {
    SceneSpec scene;
    scene.width = scene.height = 256;
    scene.pixel_pitch = 0.5;
    scene.vias = {{64, 64, 25, 15, 40, WallProfile::StraightTaper, rim_amplitude}};
    const auto lights = LightSet::from_directions(kSevenLights);
    const auto stack = render_scene(scene, lights, 0);
    auto depth = integrate(normals_to_gradients(estimate_normals(stack, lights)), scene.pixel_pitch);
    LevelingParams p;
    p.spatial_sigma = 1.0;
    p.window_radius = LevelingParams::default_window_radius(1.0);
    p.depth_sigma = raster_max(depth.z) - raster_min(depth.z);
    const auto m = measure_via(level_depth(depth, p), 10);
    double mean = 0.0;
    for (const auto& s : m.profiles) mean += s.roundness;
    mean /= static_cast<double>(m.profiles.size());
    double var = 0.0;
    for (const auto& s : m.profiles) var += (s.roundness - mean) * (s.roundness - mean);
    return std::sqrt(var / static_cast<double>(m.profiles.size()));
}

// 5. Least-squares circle metrology.
Outcome lsc_metrology() {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::uniform_real_distribution<double> ur(0.5, 60.0);
    double fit_err = 0.0;
    double round_err = 0.0;
    for (int t = 0; t < 40; ++t) {
        const double cx = u(rng);
        const double cy = u(rng);
        const double r = ur(rng);
        std::vector<Point2> pts;
        const int count = 3 + t;
        for (int i = 0; i < count; ++i) {
            const double a = 0.3 * t + 2.0 * kPi * i / count;
            pts.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
        }
        const auto c = fit_lsc(pts);
        fit_err = std::max({fit_err, std::abs(c.cx - cx), std::abs(c.cy - cy), std::abs(c.r - r)});
        // Exact circle: roundness against its own center.
        round_err = std::max(round_err, roundness(pts, {cx, cy, r}) / std::max(1.0, r));
    }

    std::uniform_real_distribution<double> dr(-0.2, 0.2);
    std::vector<Point2> pts;
    for (int i = 0; i < 60; ++i) {
        const double a = 2.0 * kPi * i / 60.0;
        pts.push_back({3.0 + (5.0 + dr(rng)) * std::cos(a), -2.0 + (5.0 + dr(rng)) * std::sin(a)});
    }
    const auto base = fit_lsc(pts);
    const double base_round = roundness(pts, base);
    double equi_err = 0.0;
    for (int t = 0; t < 10; ++t) {
        const double th = 0.61 * t;
        const double s = 0.25 + 0.5 * t;
        const double tx = u(rng);
        const double ty = u(rng);
        std::vector<Point2> moved;
        for (const auto& p : pts) {
            moved.push_back({s * (std::cos(th) * p.x - std::sin(th) * p.y) + tx,
                             s * (std::sin(th) * p.x + std::cos(th) * p.y) + ty});
        }
        const auto c = fit_lsc(moved);
        const double ex = s * (std::cos(th) * base.cx - std::sin(th) * base.cy) + tx;
        const double ey = s * (std::sin(th) * base.cx + std::cos(th) * base.cy) + ty;
        equi_err = std::max({equi_err, std::abs(c.cx - ex), std::abs(c.cy - ey), std::abs(c.r - s * base.r),
                             std::abs(roundness(moved, c) - s * base_round)});
    }

    const double spread_clean = roundness_spread(0.0);
    const double spread_rim = roundness_spread(1.5);
    return {fit_err <= 1e-9 && round_err <= 1e-12 && equi_err <= 1e-9 && spread_rim > spread_clean,
            fmt("exact-circle fit err %.2e, roundness %.2e, equivariance err %.2e, roundness-vs-depth std "
                "%.4f um (rim noise 1.5 um) vs %.4f um (none)",
                fit_err, round_err, equi_err, spread_rim, spread_clean)};
}

// 6. Every depth map a pipeline stage produces starts at zero; planes vanish.
Outcome detrend_contract(const Workspace& ws) {
    const auto dir = ws.dir("c6");
    run_chain(dir, kFiveLights, 0.005, 9);
    double worst_min = 0.0;
    for (const char* name : {"truth.fdm1", "depth.fdm1", "level.fdm1"}) {
        worst_min = std::max(worst_min, std::abs(raster_min(load_depth_map(dir / name).z)));
    }

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst_plane = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double a = u(rng);
        const double b = u(rng);
        const double c = u(rng);
        RasterD z(7 + t, 5 + 2 * t);
        for (std::size_t y = 0; y < z.height(); ++y) {
            for (std::size_t x = 0; x < z.width(); ++x) z(x, y) = a * x + b * y + c;
        }
        const auto d = detrend(z, 1.0);
        for (double v : d.z.values()) worst_plane = std::max(worst_plane, std::abs(v));
        GradientField g{RasterD(z.width(), z.height(), a), RasterD(z.width(), z.height(), b),
                        Mask(z.width(), z.height(), 1)};
        const auto integrated = integrate(g, 0.5);
        worst_min = std::max(worst_min, std::abs(raster_min(integrated.z)));
        for (double v : integrated.z.values()) worst_plane = std::max(worst_plane, std::abs(v));
    }
    return {worst_min <= 1e-9 && worst_plane <= 1e-9,
            fmt("max |min(z)| over pipeline outputs %.2e, max |z| for pure planes %.2e", worst_min, worst_plane)};
}

// 7. Illumination geometry.
Outcome illumination() {
    const SubstrateSpec glass{1.5, "glass", 1.0};
    const ObjectiveSpec narrow{0.25, 1.0};
    const auto range = light_height_range(narrow, glass, 10.0);
    if (!range) return {false, "NA 0.25 gave an empty range"};
    const double e_min = std::abs(incidence_angle(10.0, range->h_min) - critical_angle(glass));
    const double e_max = std::abs(incidence_angle(10.0, range->h_max) - 2.0 * aperture_angle(narrow));
    const bool empty = !light_height_range({0.4, 1.0}, glass, 10.0).has_value();
    return {e_min <= 1e-12 && e_max <= 1e-12 && empty,
            fmt("NA 0.25: h = %.4f..%.4f mm, endpoint angle errors %.1e / %.1e rad; NA 0.4: %s", range->h_min,
                range->h_max, e_min, e_max, empty ? "EMPTY" : "non-empty")};
}

// 8. Byte-identical reruns and malformed-fixture rejection.
Outcome determinism_and_formats(const Workspace& ws) {
    std::vector<fs::path> dirs{ws.dir("c8a"), ws.dir("c8b")};
    for (const auto& dir : dirs) {
        run_chain(dir, kSevenLights, 0.01, 77);
        write_text(dir / "ref.csv", std::string(kReferenceHeader) + "\r\n0,50,50\r\n");
        cli_or_throw({"compare", "--reference", (dir / "ref.csv").string(), "--in", (dir / "metrics.csv").string(),
                      "--out", (dir / "report.csv").string()});
    }
    int identical = 0;
    int compared = 0;
    for (const char* name : {"truth.fdm1", "depth.fdm1", "level.fdm1", "metrics.csv", "metrics.summary.csv",
                             "report.csv", "frame_000.pgm", "frame_006.pgm"}) {
        ++compared;
        identical += read_file(dirs[0] / name) == read_file(dirs[1] / name) ? 1 : 0;
    }

    const fs::path data = VIASCOPE_TEST_DATA;
    struct Fixture {
        const char* file;
        ErrorCode expected;
    };
    const Fixture fixtures[] = {{"bad_magic.fdm1", ErrorCode::BadMagic},
                                {"truncated.fdm1", ErrorCode::TruncatedPayload},
                                {"bad_header.fdm1", ErrorCode::MalformedHeader},
                                {"bad_maxval.pgm", ErrorCode::UnsupportedMaxval},
                                {"truncated.pgm", ErrorCode::TruncatedPayload},
                                {"ascii.pgm", ErrorCode::MalformedHeader}};
    int rejected = 0;
    for (const auto& f : fixtures) {
        try {
            if (fs::path(f.file).extension() == ".pgm") {
                load_pgm(data / f.file);
            } else {
                load_depth_map(data / f.file);
            }
        } catch (const Error& e) {
            rejected += e.code() == f.expected ? 1 : 0;
        }
    }
    const int total = static_cast<int>(std::size(fixtures));
    return {identical == compared && rejected == total,
            fmt("%d/%d outputs byte-identical across two seeded runs, %d/%d malformed fixtures rejected with the "
                "expected error",
                identical, compared, rejected, total)};
}

}  // namespace

int main() {
    Workspace ws;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 noiseless normal round trip", noiseless_round_trip},
        {"2 depth and diameter accuracy", [&] { return depth_accuracy(ws); }},
        {"3 Poisson solver on a spherical cap", poisson_cap},
        {"4 DCT round trip", dct_round_trip},
        {"5 LSC metrology", lsc_metrology},
        {"6 detrend contract", [&] { return detrend_contract(ws); }},
        {"7 illumination geometry", illumination},
        {"8 determinism and formats", [&] { return determinism_and_formats(ws); }},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
