#include "viascope/config.hpp"

#include <json.hpp>

namespace viascope {
namespace {

using nlohmann::json;

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("invalid JSON: ") + e.what());
    }
}

template <typename T>
T field(const json& obj, const char* key) {
    if (!obj.contains(key)) throw Error(ErrorCode::InvalidArgument, std::string("missing field '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? field<T>(obj, key) : fallback;
}

std::size_t dimension(const json& obj, const char* key) {
    if (obj.contains(key) && (!obj.at(key).is_number_integer() || obj.at(key).get<long long>() <= 0)) {
        throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' must be a positive integer");
    }
    return field<std::size_t>(obj, key);
}

const char* to_text(WallProfile p) {
    return p == WallProfile::StraightTaper ? "straight-taper" : "cosine-rounded-rim";
}

}  // namespace

LightSet LightConfig::to_light_set() const {
    if (kind == LightKind::Positions) return normalize_lights(vectors);
    if (vectors.size() < 3) throw Error(ErrorCode::InvalidArgument, "at least 3 light directions are required");
    return LightSet::from_directions(vectors);
}

LightConfig parse_light_config(std::string_view json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "light file must hold a JSON object");
    LightConfig cfg;
    const auto kind = field<std::string>(doc, "kind");
    if (kind == "positions") {
        cfg.kind = LightKind::Positions;
    } else if (kind == "directions") {
        cfg.kind = LightKind::Directions;
    } else {
        throw Error(ErrorCode::InvalidArgument, "light kind must be 'positions' or 'directions'");
    }
    for (const auto& v : field<std::vector<std::vector<double>>>(doc, "lights")) {
        if (v.size() != 3) throw Error(ErrorCode::InvalidArgument, "each light needs 3 components");
        cfg.vectors.emplace_back(v[0], v[1], v[2]);
    }
    cfg.to_light_set();  // validates
    return cfg;
}

std::string serialize_light_config(const LightConfig& config) {
    json doc;
    doc["kind"] = config.kind == LightKind::Positions ? "positions" : "directions";
    doc["lights"] = json::array();
    for (const auto& v : config.vectors) doc["lights"].push_back({v.x(), v.y(), v.z()});
    return doc.dump(2) + "\n";
}

SceneSpec parse_scene_config(std::string_view json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "scene file must hold a JSON object");
    SceneSpec scene;
    scene.width = dimension(doc, "width");
    scene.height = dimension(doc, "height");
    scene.pixel_pitch = field<double>(doc, "pixel_pitch_um");
    scene.albedo = field_or<double>(doc, "albedo", scene.albedo);
    scene.noise_sigma = field_or<double>(doc, "noise_sigma", 0.0);
    const auto shadow = field_or<std::string>(doc, "shadow_model", "none");
    if (shadow == "none") {
        scene.shadow_model = ShadowModel::None;
    } else if (shadow == "horizon") {
        scene.shadow_model = ShadowModel::Horizon;
    } else {
        throw Error(ErrorCode::InvalidArgument, "shadow_model must be 'none' or 'horizon'");
    }
    if (doc.contains("vias")) {
        if (!doc.at("vias").is_array()) throw Error(ErrorCode::InvalidArgument, "'vias' must be an array");
        for (const auto& v : doc.at("vias")) {
            ViaSpec via;
            const auto center = field<std::vector<double>>(v, "center_um");
            if (center.size() != 2) throw Error(ErrorCode::InvalidArgument, "center_um needs 2 components");
            via.center_x = center[0];
            via.center_y = center[1];
            via.radius_top = field<double>(v, "radius_top_um");
            via.radius_bottom = field<double>(v, "radius_bottom_um");
            via.depth = field<double>(v, "depth_um");
            const auto profile = field_or<std::string>(v, "wall_profile", "straight-taper");
            if (profile == "straight-taper") {
                via.wall_profile = WallProfile::StraightTaper;
            } else if (profile == "cosine-rounded-rim") {
                via.wall_profile = WallProfile::CosineRoundedRim;
            } else {
                throw Error(ErrorCode::InvalidArgument, "unknown wall_profile '" + profile + "'");
            }
            via.rim_noise_amplitude = field_or<double>(v, "rim_noise_amplitude_um", 0.0);
            scene.vias.push_back(via);
        }
    }
    scene.validate();
    return scene;
}

std::string serialize_scene_config(const SceneSpec& scene) {
    json doc;
    doc["width"] = scene.width;
    doc["height"] = scene.height;
    doc["pixel_pitch_um"] = scene.pixel_pitch;
    doc["albedo"] = scene.albedo;
    doc["noise_sigma"] = scene.noise_sigma;
    doc["shadow_model"] = scene.shadow_model == ShadowModel::None ? "none" : "horizon";
    doc["vias"] = json::array();
    for (const auto& v : scene.vias) {
        doc["vias"].push_back({{"center_um", {v.center_x, v.center_y}},
                               {"radius_top_um", v.radius_top},
                               {"radius_bottom_um", v.radius_bottom},
                               {"depth_um", v.depth},
                               {"wall_profile", to_text(v.wall_profile)},
                               {"rim_noise_amplitude_um", v.rim_noise_amplitude}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace viascope
