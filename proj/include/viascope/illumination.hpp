#pragma once

#include <optional>
#include <string>

namespace viascope {

struct ObjectiveSpec {
    double numerical_aperture = 0.0;
    double immersion_index = 1.0;  // air
};

struct SubstrateSpec {
    double refractive_index = 1.5;
    std::string name;
    /// Index of the medium on the far side of the interface; 1.0 is air.
    double exit_index = 1.0;
};

/// Half acceptance angle of the objective, asin(NA / immersion_index), radians.
double aperture_angle(const ObjectiveSpec& objective);

/// Total-reflection limit asin(exit_index / refractive_index), radians.
double critical_angle(const SubstrateSpec& substrate);

/// Mount heights, in the units of the lateral offset.
struct HeightRange {
    double h_min = 0.0;
    double h_max = 0.0;
};

/// Heights h for which the incidence angle atan(offset / h), measured from the
/// optical axis, lies strictly between twice the aperture angle (dark field)
/// and the critical angle. Returns nullopt when no height qualifies.
std::optional<HeightRange> light_height_range(const ObjectiveSpec& objective, const SubstrateSpec& substrate,
                                              double lateral_offset);

/// Incidence angle from the vertical for a light at (offset, height).
double incidence_angle(double lateral_offset, double height);

}  // namespace viascope
