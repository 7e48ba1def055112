#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "viascope/photometric_stereo.hpp"
#include "viascope/synthetic.hpp"

namespace viascope {

// Light file:
//   {"kind": "positions", "lights": [[x_mm, y_mm, z_mm], ...]}
//   {"kind": "directions", "lights": [[lx, ly, lz], ...]}
// Positions are normalized on load; directions must already be unit length.
enum class LightKind { Positions, Directions };

struct LightConfig {
    LightKind kind = LightKind::Directions;
    std::vector<Eigen::Vector3d> vectors;

    LightSet to_light_set() const;
};

LightConfig parse_light_config(std::string_view json_text);
std::string serialize_light_config(const LightConfig& config);

// Scene file:
//   {"width": 256, "height": 256, "pixel_pitch_um": 0.5, "albedo": 0.8,
//    "noise_sigma": 0.0, "shadow_model": "none" | "horizon",
//    "vias": [{"center_um": [64, 64], "radius_top_um": 25, "radius_bottom_um": 23,
//              "depth_um": 50, "wall_profile": "straight-taper" | "cosine-rounded-rim",
//              "rim_noise_amplitude_um": 0}]}
SceneSpec parse_scene_config(std::string_view json_text);
std::string serialize_scene_config(const SceneSpec& scene);

}  // namespace viascope
