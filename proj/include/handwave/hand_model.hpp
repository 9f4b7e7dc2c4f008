#pragma once

#include <cstdint>
#include <vector>

#include "handwave/core_types.hpp"

namespace handwave {

/// Version tag of the built-in anthropometric layout (sensor planform table
/// plus dorsum height model). Bump when any constant changes.
extern const char* const kHandLayoutVersion;

/// Default 42-sensor configuration at a given hand scale. Positions scale
/// linearly with hand_scale; orientations are scale-invariant.
/// Pre: hand_scale within [0.5, 2.0], else ConfigError.
SensorConfig default_config(double hand_scale);

/// Dorsal surface height (mm) of the built-in hand model at planform (x, y),
/// before hand_scale is applied.
double dorsum_height(double x, double y);

/// Outward surface normal of the built-in hand model at planform (x, y).
Vec3 dorsum_normal(double x, double y);

/// Region labels for fixture vertices: 0 = palm, 1..5 = digit I..V.
using Region = std::uint8_t;
constexpr Region kRegionPalm = 0;

Region region_for_digit(Digit d);

struct HandFixture {
    std::vector<Vec3> points;     // mm
    std::vector<Region> regions;  // parallel to points
};

/// Procedurally sampled dorsal hand surface (neutral open posture) used as
/// the bundled mesh fixture: a ~1.6 mm grid over the hand planform, lifted
/// by the dorsum height model. Deterministic.
HandFixture make_hand_fixture(double hand_scale = 1.0);

/// Planform (x, y) of the point used as "tip of digit d" in scenarios.
Vec3 digit_tip_position(Digit d, double hand_scale = 1.0);

} // namespace handwave
