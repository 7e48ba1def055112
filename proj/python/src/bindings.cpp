#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "viascope/config.hpp"
#include "viascope/depth_integration.hpp"
#include "viascope/illumination.hpp"
#include "viascope/io.hpp"
#include "viascope/leveling.hpp"
#include "viascope/metrology.hpp"
#include "viascope/photometric_stereo.hpp"
#include "viascope/synthetic.hpp"

namespace py = pybind11;
using namespace viascope;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

RasterD to_raster(const Array& a) {
    if (a.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "expected a 2-D array");
    RasterD r(static_cast<std::size_t>(a.shape(1)), static_cast<std::size_t>(a.shape(0)));
    std::copy(a.data(), a.data() + a.size(), r.values().begin());
    return r;
}

Array from_raster(const RasterD& r) {
    Array a({r.height(), r.width()});
    std::copy(r.values().begin(), r.values().end(), a.mutable_data());
    return a;
}

py::array_t<bool> from_mask(const Mask& m) {
    py::array_t<bool> a({m.height(), m.width()});
    auto* out = a.mutable_data();
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] != 0;
    return a;
}

Mask to_mask(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "expected a 2-D mask");
    Mask m(static_cast<std::size_t>(a.shape(1)), static_cast<std::size_t>(a.shape(0)));
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = a.data()[i] ? 1 : 0;
    return m;
}

std::vector<Eigen::Vector3d> to_vectors(const Array& a) {
    if (a.ndim() != 2 || a.shape(1) != 3) throw Error(ErrorCode::InvalidArgument, "expected an (N, 3) array");
    std::vector<Eigen::Vector3d> out;
    for (py::ssize_t i = 0; i < a.shape(0); ++i) out.emplace_back(a.at(i, 0), a.at(i, 1), a.at(i, 2));
    return out;
}

Array from_vectors(std::span<const Eigen::Vector3d> v) {
    Array a({v.size(), std::size_t{3}});
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (int j = 0; j < 3; ++j) a.mutable_at(i, j) = v[i](j);
    }
    return a;
}

std::vector<Point2> to_points(const Array& a) {
    if (a.ndim() != 2 || a.shape(1) != 2) throw Error(ErrorCode::InvalidArgument, "expected an (N, 2) array");
    std::vector<Point2> out;
    for (py::ssize_t i = 0; i < a.shape(0); ++i) out.push_back({a.at(i, 0), a.at(i, 1)});
    return out;
}

ImageStack to_stack(const Array& images, double pixel_pitch) {
    if (images.ndim() != 3) throw Error(ErrorCode::InvalidArgument, "expected a (K, H, W) image stack");
    ImageStack stack;
    stack.pixel_pitch = pixel_pitch;
    const auto h = static_cast<std::size_t>(images.shape(1));
    const auto w = static_cast<std::size_t>(images.shape(2));
    for (py::ssize_t k = 0; k < images.shape(0); ++k) {
        RasterD frame(w, h);
        const double* src = images.data() + k * static_cast<py::ssize_t>(w * h);
        std::copy(src, src + w * h, frame.values().begin());
        stack.frames.push_back(std::move(frame));
    }
    return stack;
}

Array from_stack(const ImageStack& stack) {
    Array a({stack.count(), stack.height(), stack.width()});
    double* dst = a.mutable_data();
    for (const auto& f : stack.frames) dst = std::copy(f.values().begin(), f.values().end(), dst);
    return a;
}

GradientField to_gradients(const Array& p, const Array& q, const std::optional<py::array_t<bool>>& mask) {
    GradientField g{to_raster(p), to_raster(q), {}};
    if (!g.p.same_shape(g.q)) throw Error(ErrorCode::ShapeMismatch, "p and q differ in shape");
    g.mask = mask ? to_mask(*mask) : Mask(g.p.width(), g.p.height(), 1);
    return g;
}

MeanRegion parse_region(const std::string& name) {
    if (name == "global") return MeanRegion::Global;
    if (name == "surface") return MeanRegion::Surface;
    throw Error(ErrorCode::InvalidArgument, "mean_region must be 'global' or 'surface'");
}

py::dict slice_dict(const SliceProfile& s) {
    py::dict d;
    d["level"] = s.level;
    d["center"] = py::make_tuple(s.circle.cx, s.circle.cy);
    d["radius"] = s.circle.r;
    d["roundness"] = s.roundness;
    d["point_count"] = s.point_count;
    return d;
}

}  // namespace

PYBIND11_MODULE(_viascope, m) {
    m.doc() = "Photometric-stereo depth metrology for laser-drilled vias.";

    static py::exception<Error> error_type(m, "ViascopeError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object instance = py::handle(error_type.ptr())(e.what());
            instance.attr("code") = std::string(to_string(e.code()));
            instance.attr("category") = e.category() == ErrorCategory::Input ? "input" : "numerical";
            PyErr_SetObject(error_type.ptr(), instance.ptr());
        }
    });

    m.def(
        "normalize_lights", [](const Array& positions) { return from_vectors(normalize_lights(to_vectors(positions)).directions()); },
        py::arg("positions"), "Unit directions from LED positions (N, 3), millimeters relative to the sample.");

    m.def(
        "estimate_normals",
        [](const Array& images, const Array& lights, double shadow_threshold) {
            const auto field =
                estimate_normals(to_stack(images, 1.0), LightSet::from_directions(to_vectors(lights)), shadow_threshold);
            py::array_t<double> normals({field.height(), field.width(), std::size_t{3}});
            double* out = normals.mutable_data();
            for (const auto& n : field.normals.values()) {
                for (int j = 0; j < 3; ++j) *out++ = n(j);
            }
            py::dict d;
            d["normals"] = normals;
            d["albedo"] = from_raster(field.albedo);
            d["mask"] = from_mask(field.mask);
            d["residual"] = from_raster(field.residual);
            return d;
        },
        py::arg("images"), py::arg("lights"), py::arg("shadow_threshold") = kDefaultShadowThreshold,
        "Per-pixel Lambertian solve. images is (K, H, W), lights is (K, 3) unit directions.");

    m.def(
        "normals_to_gradients",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& normals,
           const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask) {
            if (normals.ndim() != 3 || normals.shape(2) != 3) {
                throw Error(ErrorCode::InvalidArgument, "expected (H, W, 3) normals");
            }
            NormalField field;
            field.mask = to_mask(mask);
            const auto w = static_cast<std::size_t>(normals.shape(1));
            const auto h = static_cast<std::size_t>(normals.shape(0));
            if (field.mask.width() != w || field.mask.height() != h) {
                throw Error(ErrorCode::ShapeMismatch, "mask and normals differ in shape");
            }
            field.normals = Raster<Eigen::Vector3d>(w, h);
            const double* src = normals.data();
            for (auto& n : field.normals.values()) {
                n = Eigen::Vector3d(src[0], src[1], src[2]);
                src += 3;
            }
            field.albedo = RasterD(w, h, 1.0);
            field.residual = RasterD(w, h, 0.0);
            const auto g = normals_to_gradients(field);
            return py::make_tuple(from_raster(g.p), from_raster(g.q), from_mask(g.mask));
        },
        py::arg("normals"), py::arg("mask"), "Returns (p, q, mask) with p = -nx/nz and q = -ny/nz.");

    m.def(
        "integrate",
        [](const Array& p, const Array& q, double pixel_pitch, const std::optional<py::array_t<bool>>& mask) {
            return from_raster(integrate(to_gradients(p, q, mask), pixel_pitch).z);
        },
        py::arg("p"), py::arg("q"), py::arg("pixel_pitch"), py::arg("mask") = py::none(),
        "Neumann Poisson integration of a gradient field, detrended to a minimum of zero.");

    m.def("dct2", [](const Array& x) { return from_raster(dct2(to_raster(x))); }, py::arg("x"));
    m.def("idct2", [](const Array& x) { return from_raster(idct2(to_raster(x))); }, py::arg("coefficients"));
    m.def("poisson_solve", [](const Array& f) { return from_raster(poisson_solve(to_raster(f))); }, py::arg("f"));
    m.def(
        "detrend",
        [](const Array& z, double pixel_pitch, const std::optional<py::array_t<bool>>& mask) {
            const auto raster = to_raster(z);
            return from_raster(mask ? detrend(raster, pixel_pitch, to_mask(*mask)).z : detrend(raster, pixel_pitch).z);
        },
        py::arg("z"), py::arg("pixel_pitch"), py::arg("mask") = py::none());

    m.def(
        "level_depth",
        [](const Array& z, double pixel_pitch, std::optional<double> spatial_sigma, std::optional<double> depth_sigma,
           std::optional<int> window_radius, const std::string& mean_region) {
            const DepthMap map{to_raster(z), pixel_pitch};
            auto params = LevelingParams::defaults_for(map);
            if (spatial_sigma) {
                params.spatial_sigma = *spatial_sigma;
                params.window_radius = LevelingParams::default_window_radius(*spatial_sigma);
            }
            if (depth_sigma) params.depth_sigma = *depth_sigma;
            if (window_radius) params.window_radius = *window_radius;
            return from_raster(level_depth(map, params, parse_region(mean_region)).z);
        },
        py::arg("z"), py::arg("pixel_pitch"), py::arg("spatial_sigma") = py::none(),
        py::arg("depth_sigma") = py::none(), py::arg("window_radius") = py::none(),
        py::arg("mean_region") = "global");

    m.def(
        "fit_lsc",
        [](const Array& points) {
            const auto c = fit_lsc(to_points(points));
            return py::make_tuple(c.cx, c.cy, c.r);
        },
        py::arg("points"), "Geometric least-squares circle (cx, cy, r) through (N, 2) points.");
    m.def(
        "roundness",
        [](const Array& points, double cx, double cy, double r) { return roundness(to_points(points), {cx, cy, r}); },
        py::arg("points"), py::arg("cx"), py::arg("cy"), py::arg("r"));

    m.def(
        "measure_via",
        [](const Array& z, double pixel_pitch, int slice_count) {
            const auto v = measure_via(DepthMap{to_raster(z), pixel_pitch}, slice_count);
            py::list slices;
            for (const auto& s : v.profiles) slices.append(slice_dict(s));
            py::dict d;
            d["depth"] = v.depth;
            d["diameter"] = v.diameter;
            d["profiles"] = slices;
            return d;
        },
        py::arg("z"), py::arg("pixel_pitch"), py::arg("slice_count") = 10);

    m.def("aperture_angle", [](double na, double n_medium) { return aperture_angle({na, n_medium}); }, py::arg("na"),
          py::arg("n_medium") = 1.0);
    m.def(
        "critical_angle", [](double n_substrate, double n_outside) { return critical_angle({n_substrate, "", n_outside}); },
        py::arg("n_substrate"), py::arg("n_outside") = 1.0);
    m.def(
        "light_height_range",
        [](double na, double n_substrate, double offset, double n_medium) -> std::optional<py::tuple> {
            const auto range = light_height_range({na, n_medium}, {n_substrate, "", n_medium}, offset);
            if (!range) return std::nullopt;
            return py::make_tuple(range->h_min, range->h_max);
        },
        py::arg("na"), py::arg("n_substrate"), py::arg("offset"), py::arg("n_medium") = 1.0,
        "(h_min, h_max) of usable light heights, or None when the window is empty.");

    m.def(
        "render_scene",
        [](const std::string& scene_json, const Array& lights, std::uint64_t seed) {
            const auto scene = parse_scene_config(scene_json);
            return from_stack(render_scene(scene, LightSet::from_directions(to_vectors(lights)), seed));
        },
        py::arg("scene_json"), py::arg("lights"), py::arg("seed") = 0,
        "Renders a scene configuration (JSON text) under (K, 3) unit light directions.");
    m.def(
        "analytic_depth",
        [](const std::string& scene_json) { return from_raster(analytic_depth(parse_scene_config(scene_json)).z); },
        py::arg("scene_json"));

    m.def("load_pgm", [](const std::string& path) { return from_raster(load_pgm(path)); }, py::arg("path"));
    m.def(
        "save_pgm16", [](const std::string& path, const Array& intensities) { save_pgm16(path, to_raster(intensities)); },
        py::arg("path"), py::arg("intensities"));
    m.def(
        "load_depth_map",
        [](const std::string& path) {
            const auto map = load_depth_map(path);
            return py::make_tuple(from_raster(map.z), map.pixel_pitch);
        },
        py::arg("path"), "Returns (z, pixel_pitch) from an FDM1 file.");
    m.def(
        "save_depth_map",
        [](const std::string& path, const Array& z, double pixel_pitch) {
            save_depth_map(path, DepthMap{to_raster(z), pixel_pitch});
        },
        py::arg("path"), py::arg("z"), py::arg("pixel_pitch"));
}
