"""Photometric-stereo depth metrology for laser-drilled vias."""

from ._viascope import (
    ViascopeError,
    analytic_depth,
    aperture_angle,
    critical_angle,
    dct2,
    detrend,
    estimate_normals,
    fit_lsc,
    idct2,
    integrate,
    level_depth,
    light_height_range,
    load_depth_map,
    load_pgm,
    measure_via,
    normalize_lights,
    normals_to_gradients,
    poisson_solve,
    render_scene,
    roundness,
    save_depth_map,
    save_pgm16,
)

__all__ = [
    "ViascopeError",
    "analytic_depth",
    "aperture_angle",
    "critical_angle",
    "dct2",
    "detrend",
    "estimate_normals",
    "fit_lsc",
    "idct2",
    "integrate",
    "level_depth",
    "light_height_range",
    "load_depth_map",
    "load_pgm",
    "measure_via",
    "normalize_lights",
    "normals_to_gradients",
    "poisson_solve",
    "render_scene",
    "roundness",
    "save_depth_map",
    "save_pgm16",
]
