#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "viascope/error.hpp"
#include "viascope/illumination.hpp"

using namespace viascope;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

const SubstrateSpec kGlass{1.5, "glass", 1.0};

}  // namespace

TEST(ApertureAngle, Values) {
    EXPECT_NEAR(aperture_angle({0.5, 1.0}), std::numbers::pi / 6.0, 1e-15);
    EXPECT_NEAR(std::sin(aperture_angle({0.25, 1.0})), 0.25, 1e-12);
    EXPECT_NEAR(aperture_angle({0.75, 1.5}), std::numbers::pi / 6.0, 1e-15);
}

TEST(ApertureAngle, Rejections) {
    EXPECT_EQ(code_of([] { aperture_angle({1.0, 1.0}); }), ErrorCode::InvalidNA);
    EXPECT_EQ(code_of([] { aperture_angle({0.0, 1.0}); }), ErrorCode::InvalidNA);
    EXPECT_EQ(code_of([] { aperture_angle({1.2, 1.0}); }), ErrorCode::InvalidNA);
}

TEST(CriticalAngle, Values) {
    EXPECT_NEAR(critical_angle({2.0, "", 1.0}), std::numbers::pi / 6.0, 1e-15);
    const double glass = critical_angle(kGlass);
    EXPECT_NEAR(glass, 0.7297, 1e-4);
    EXPECT_NEAR(std::sin(glass) * 1.5, 1.0, 1e-12);
    EXPECT_EQ(code_of([] { critical_angle({1.0, "", 1.0}); }), ErrorCode::InvalidIndex);
    EXPECT_EQ(code_of([] { critical_angle({1.2, "", 1.33}); }), ErrorCode::InvalidIndex);
}

TEST(LightHeightRange, GlassAtTenMillimeters) {
    const ObjectiveSpec objective{0.25, 1.0};
    const auto range = light_height_range(objective, kGlass, 10.0);
    ASSERT_TRUE(range.has_value());
    EXPECT_NEAR(range->h_min, 11.18, 0.005);
    EXPECT_NEAR(range->h_max, 18.07, 0.005);
    EXPECT_NEAR(incidence_angle(10.0, range->h_min), critical_angle(kGlass), 1e-12);
    EXPECT_NEAR(incidence_angle(10.0, range->h_max), 2.0 * aperture_angle(objective), 1e-12);
}

TEST(LightHeightRange, WideApertureIsEmpty) {
    EXPECT_FALSE(light_height_range({0.4, 1.0}, kGlass, 10.0).has_value());
    // 2 theta reaching 90 degrees leaves nothing either.
    EXPECT_FALSE(light_height_range({0.75, 1.0}, {4.0, "", 1.0}, 10.0).has_value());
}

TEST(LightHeightRange, ScalesLinearlyWithOffset) {
    const ObjectiveSpec objective{0.2, 1.0};
    const auto a = light_height_range(objective, kGlass, 1.0);
    const auto b = light_height_range(objective, kGlass, 7.5);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(b->h_min, 7.5 * a->h_min, 1e-12);
    EXPECT_NEAR(b->h_max, 7.5 * a->h_max, 1e-12);
    EXPECT_LT(a->h_min, a->h_max);
}

TEST(LightHeightRange, Rejections) {
    EXPECT_EQ(code_of([] { light_height_range({0.25, 1.0}, kGlass, 0.0); }), ErrorCode::NonpositiveOffset);
    EXPECT_EQ(code_of([] { light_height_range({0.25, 1.0}, kGlass, -3.0); }), ErrorCode::NonpositiveOffset);
    EXPECT_EQ(code_of([] { light_height_range({1.5, 1.0}, kGlass, 3.0); }), ErrorCode::InvalidNA);
}

TEST(IncidenceAngle, Geometry) {
    EXPECT_NEAR(incidence_angle(1.0, 1.0), std::numbers::pi / 4.0, 1e-15);
    EXPECT_NEAR(incidence_angle(0.0, 5.0), 0.0, 1e-15);
}
