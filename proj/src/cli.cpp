#include "viascope/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "viascope/config.hpp"
#include "viascope/illumination.hpp"
#include "viascope/io.hpp"
#include "viascope/leveling.hpp"
#include "viascope/report.hpp"

namespace viascope {
namespace {

namespace fs = std::filesystem;

// Files produced by one subcommand; written together once everything succeeded.
class OutputBatch {
public:
    void add(fs::path path, std::string bytes) { files_.emplace_back(std::move(path), std::move(bytes)); }

    void commit() {
        for (std::size_t i = 0; i < files_.size(); ++i) {
            try {
                write_file_atomic(files_[i].first, files_[i].second);
            } catch (...) {
                for (std::size_t j = 0; j < i; ++j) {
                    std::error_code ignored;
                    fs::remove(files_[j].first, ignored);
                }
                throw;
            }
        }
    }

private:
    std::vector<std::pair<fs::path, std::string>> files_;
};

std::string depth_bytes(const DepthMap& map) {
    std::ostringstream os(std::ios::binary);
    write_depth_map(os, map);
    return os.str();
}

std::string pgm_bytes(const RasterD& raster) {
    std::ostringstream os(std::ios::binary);
    write_pgm16(os, raster);
    return os.str();
}

void require_distinct(std::initializer_list<fs::path> paths) {
    std::vector<fs::path> seen;
    for (const auto& p : paths) {
        if (p.empty()) continue;
        const auto normal = fs::absolute(p).lexically_normal();
        for (const auto& s : seen) {
            if (s == normal) throw Error(ErrorCode::InvalidArgument, "input and output paths must differ: " + p.string());
        }
        seen.push_back(normal);
    }
}

fs::path companion_summary(const fs::path& metrics) {
    auto p = metrics;
    p.replace_extension(".summary.csv");
    return p;
}

struct RenderArgs {
    std::string scene;
    std::string lights;
    std::string out_dir;
    std::optional<double> noise;
    std::uint64_t seed = 0;
};

void run_render(const RenderArgs& a, std::ostream& out) {
    SceneSpec scene = parse_scene_config(read_file(a.scene));
    if (a.noise) scene.noise_sigma = *a.noise;
    scene.validate();
    const LightSet lights = parse_light_config(read_file(a.lights)).to_light_set();
    const ImageStack stack = render_scene(scene, lights, a.seed);
    DepthMap truth = analytic_depth(scene);
    const double lowest = raster_min(truth.z);
    for (double& v : truth.z.values()) v -= lowest;

    const fs::path dir(a.out_dir);
    OutputBatch batch;
    for (std::size_t k = 0; k < stack.count(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.pgm", k);
        batch.add(dir / name, pgm_bytes(stack.frames[k]));
    }
    batch.add(dir / "truth.fdm1", depth_bytes(truth));

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
    batch.commit();
    out << "rendered " << stack.count() << " frames " << scene.width << "x" << scene.height << " to "
        << dir.string() << "\n";
}

struct ReconstructArgs {
    std::string lights;
    double pitch = 0.0;
    std::string out;
    double shadow_threshold = kDefaultShadowThreshold;
    std::vector<std::string> images;
};

void run_reconstruct(const ReconstructArgs& a, std::ostream& out) {
    if (a.images.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "reconstruct needs at least 3 images (one per light), got " +
                                                    std::to_string(a.images.size()));
    }
    for (const auto& img : a.images) require_distinct({img, a.out});
    require_distinct({a.lights, a.out});
    const LightSet lights = parse_light_config(read_file(a.lights)).to_light_set();
    const std::vector<fs::path> paths(a.images.begin(), a.images.end());
    const ImageStack stack = load_image_stack(paths, a.pitch);
    const NormalField normals = estimate_normals(stack, lights, a.shadow_threshold);
    const DepthMap depth = integrate(normals_to_gradients(normals), a.pitch);

    OutputBatch batch;
    batch.add(a.out, depth_bytes(depth));
    batch.commit();
    std::size_t valid = 0;
    for (auto m : normals.mask.values()) valid += m ? 1 : 0;
    out << "reconstructed " << depth.width() << "x" << depth.height() << " depth map, " << valid << " of "
        << normals.mask.size() << " pixels with valid normals\n";
}

struct LevelArgs {
    std::optional<double> spatial_sigma;
    std::optional<double> depth_sigma;
    std::optional<int> window_radius;
    std::string mean_region = "global";
    std::string in;
    std::string out;
};

void run_level(const LevelArgs& a, std::ostream& out) {
    require_distinct({a.in, a.out});
    const DepthMap map = load_depth_map(a.in);
    LevelingParams params = LevelingParams::defaults_for(map);
    if (a.spatial_sigma) {
        params.spatial_sigma = *a.spatial_sigma;
        params.window_radius = LevelingParams::default_window_radius(*a.spatial_sigma);
    }
    if (a.depth_sigma) params.depth_sigma = *a.depth_sigma;
    if (a.window_radius) params.window_radius = *a.window_radius;
    const MeanRegion region = a.mean_region == "surface" ? MeanRegion::Surface : MeanRegion::Global;
    const DepthMap leveled = level_depth(map, params, region);

    OutputBatch batch;
    batch.add(a.out, depth_bytes(leveled));
    batch.commit();
    out << "leveled with spatial_sigma=" << format_number(params.spatial_sigma)
        << " depth_sigma=" << format_number(params.depth_sigma) << " window_radius=" << params.window_radius << "\n";
}

struct InspectArgs {
    int slices = 10;
    std::string in;
    std::string out;
    std::string summary;
};

void run_inspect(const InspectArgs& a, std::ostream& out) {
    const fs::path summary = a.summary.empty() ? companion_summary(a.out) : fs::path(a.summary);
    require_distinct({a.in, a.out, summary});
    const DepthMap map = load_depth_map(a.in);
    const std::vector<ViaMeasurement> vias{measure_via(map, a.slices)};

    OutputBatch batch;
    batch.add(a.out, emit_profiles_csv(vias));
    batch.add(summary, emit_summary_csv(vias));
    batch.commit();
    out << "depth_um=" << format_number(vias[0].depth) << " diameter_um=" << format_number(vias[0].diameter)
        << " slices=" << vias[0].profiles.size() << "\n";
}

struct CompareArgs {
    std::string reference;
    std::string in;
    std::string out;
};

void run_compare(const CompareArgs& a, std::ostream& out) {
    require_distinct({a.reference, a.in, a.out});
    const auto refs = parse_reference_csv(read_file(a.reference));

    std::string measured_text = read_file(a.in);
    const auto rows = parse_csv(measured_text);
    if (!rows.empty() && rows[0].size() == 6 && rows[0][0] == "via_id" && rows[0][1] == "level_um") {
        measured_text = read_file(companion_summary(a.in));
    }
    std::vector<ViaMeasurement> measured;
    for (const auto& v : parse_summary_csv(measured_text)) measured.push_back({v.depth, v.diameter, {}});

    const ComparisonReport report = compare_to_reference(measured, refs);
    OutputBatch batch;
    batch.add(a.out, emit_comparison_csv(report));
    batch.commit();
    out << "depth MAPE " << format_number(report.depth_mape) << "% diameter MAPE "
        << format_number(report.diameter_mape) << "%\n";
}

struct LightcheckArgs {
    double na = 0.0;
    double immersion = 1.0;
    double n_substrate = 0.0;
    double n_exit = 1.0;
    double offset_mm = 0.0;
};

void run_lightcheck(const LightcheckArgs& a, std::ostream& out) {
    const ObjectiveSpec obj{a.na, a.immersion};
    const SubstrateSpec sub{a.n_substrate, "", a.n_exit};
    const auto range = light_height_range(obj, sub, a.offset_mm);
    if (!range) {
        out << "EMPTY\n";
        return;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6f %.6f\n", range->h_min, range->h_max);
    out << buf;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Photometric-stereo depth reconstruction and metrology for blind micro-vias", "viascope"};
    app.require_subcommand(1);

    RenderArgs render;
    auto* render_cmd = app.add_subcommand("render", "Render a synthetic image stack and its true depth map");
    render_cmd->add_option("scene", render.scene, "Scene JSON")->required();
    render_cmd->add_option("--lights", render.lights, "Light JSON")->required();
    render_cmd->add_option("--out-dir", render.out_dir, "Output directory")->required();
    render_cmd->add_option("--noise", render.noise, "Override the scene's intensity noise sigma");
    render_cmd->add_option("--seed", render.seed, "Noise seed");

    ReconstructArgs recon;
    auto* recon_cmd = app.add_subcommand("reconstruct", "Estimate normals and integrate a depth map");
    recon_cmd->add_option("--lights", recon.lights, "Light JSON")->required();
    recon_cmd->add_option("--pitch", recon.pitch, "Pixel pitch in micrometers")->required();
    recon_cmd->add_option("--out", recon.out, "Output FDM1 depth map")->required();
    recon_cmd->add_option("--shadow-threshold", recon.shadow_threshold, "Shadow intensity threshold");
    recon_cmd->add_option("images", recon.images, "PGM frames, one per light, in light order")->required();

    LevelArgs level;
    auto* level_cmd = app.add_subcommand("level", "Mean-anchored Gaussian leveling of a depth map");
    level_cmd->add_option("--spatial-sigma", level.spatial_sigma, "Spatial sigma in pixels (default 2)");
    level_cmd->add_option("--depth-sigma", level.depth_sigma, "Depth sigma in micrometers (default 10% of range)");
    level_cmd->add_option("--window-radius", level.window_radius, "Window radius in pixels (default ceil(3 sigma))");
    level_cmd->add_option("--mean-region", level.mean_region, "global or surface")
        ->check(CLI::IsMember({"global", "surface"}));
    level_cmd->add_option("--in", level.in, "Input FDM1")->required();
    level_cmd->add_option("--out", level.out, "Output FDM1")->required();

    InspectArgs inspect;
    auto* inspect_cmd = app.add_subcommand("inspect", "Measure depth, diameter and roundness per slice");
    inspect_cmd->add_option("--slices", inspect.slices, "Number of slices")->check(CLI::PositiveNumber);
    inspect_cmd->add_option("--in", inspect.in, "Input FDM1")->required();
    inspect_cmd->add_option("--out", inspect.out, "Slice profile CSV")->required();
    inspect_cmd->add_option("--summary", inspect.summary, "Depth/diameter CSV (default <out>.summary.csv)");

    CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "Compare measurements against reference values");
    compare_cmd->add_option("--reference", compare.reference, "Reference CSV")->required();
    compare_cmd->add_option("--in", compare.in, "Metrics CSV (or its summary CSV)")->required();
    compare_cmd->add_option("--out", compare.out, "Comparison CSV")->required();

    LightcheckArgs lightcheck;
    auto* light_cmd = app.add_subcommand("lightcheck", "Admissible LED mount heights for hybrid-field illumination");
    light_cmd->add_option("--na", lightcheck.na, "Objective numerical aperture")->required();
    light_cmd->add_option("--immersion", lightcheck.immersion, "Immersion medium index (default air)");
    light_cmd->add_option("--n-substrate", lightcheck.n_substrate, "Substrate refractive index")->required();
    light_cmd->add_option("--n-exit", lightcheck.n_exit, "Exit medium index (default air)");
    light_cmd->add_option("--offset-mm", lightcheck.offset_mm, "Lateral LED offset in millimeters")->required();

    std::vector<const char*> argv{"viascope"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (render_cmd->parsed()) run_render(render, out);
        if (recon_cmd->parsed()) run_reconstruct(recon, out);
        if (level_cmd->parsed()) run_level(level, out);
        if (inspect_cmd->parsed()) run_inspect(inspect, out);
        if (compare_cmd->parsed()) run_compare(compare, out);
        if (light_cmd->parsed()) run_lightcheck(lightcheck, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.category() == ErrorCategory::Numerical ? kExitNumericalError : kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

}  // namespace viascope
