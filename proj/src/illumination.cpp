#include "viascope/illumination.hpp"

#include <cmath>
#include <numbers>

#include "viascope/error.hpp"

namespace viascope {

double aperture_angle(const ObjectiveSpec& objective) {
    const double na = objective.numerical_aperture;
    const double n = objective.immersion_index;
    if (!std::isfinite(na) || !std::isfinite(n) || !(na > 0.0) || !(na < n)) {
        throw Error(ErrorCode::InvalidNA, "numerical aperture must satisfy 0 < NA < immersion index");
    }
    return std::asin(na / n);
}

double critical_angle(const SubstrateSpec& substrate) {
    const double n = substrate.refractive_index;
    const double exit = substrate.exit_index;
    if (!std::isfinite(n) || !std::isfinite(exit) || !(exit > 0.0) || !(n > exit)) {
        throw Error(ErrorCode::InvalidIndex, "substrate index must exceed the exit medium index");
    }
    return std::asin(exit / n);
}

double incidence_angle(double lateral_offset, double height) { return std::atan2(lateral_offset, height); }

std::optional<HeightRange> light_height_range(const ObjectiveSpec& objective, const SubstrateSpec& substrate,
                                              double lateral_offset) {
    if (!(lateral_offset > 0.0) || !std::isfinite(lateral_offset)) {
        throw Error(ErrorCode::NonpositiveOffset, "lateral offset must be positive");
    }
    const double dark_field = 2.0 * aperture_angle(objective);
    const double critical = critical_angle(substrate);
    if (dark_field >= critical || dark_field >= std::numbers::pi / 2.0) return std::nullopt;
    return HeightRange{lateral_offset / std::tan(critical), lateral_offset / std::tan(dark_field)};
}

}  // namespace viascope
