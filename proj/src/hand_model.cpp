#include "handwave/hand_model.hpp"

#include <algorithm>
#include <cmath>

namespace handwave {

const char* const kHandLayoutVersion = "layout-v1";

namespace {

// ---------------------------------------------------------------------------
// Layout v1: dorsal hand planform, millimeters, hand frame (origin at wrist
// center, x across the palm toward the thumb, y distal, z out of the dorsum).
// Planform coordinates were laid out once from mean adult dorsal hand
// anthropometry and are frozen; treat every constant below as part of the
// versioned layout.
// ---------------------------------------------------------------------------

struct FingerLane {
    Digit digit;
    double center_x;
    double tip_y;
};

// Digits II..V run distally from the knuckle line; the thumb is a slanted
// capsule leaving the palm on the radial side.
constexpr FingerLane kLanes[] = {
    {Digit::II, 27.0, 170.0},
    {Digit::III, 9.0, 177.0},
    {Digit::IV, -9.0, 172.0},
    {Digit::V, -27.0, 155.0},
};
constexpr double kLaneHalfWidth = 7.0;
constexpr double kLaneStartY = 93.0;

constexpr double kPalmMinX = -38.0, kPalmMaxX = 40.0;
constexpr double kPalmMinY = 0.0, kPalmMaxY = 97.0;

constexpr Vec3 kThumbA{36.0, 28.0, 0.0};
constexpr Vec3 kThumbB{78.0, 88.0, 0.0};
constexpr double kThumbHalfWidth = 9.0;

struct PlanformSensor {
    int id;
    Anatomy anatomy;
    double x;
    double y;
};

// One row per accelerometer; anatomy assignment follows the device's
// anatomical-location table (DP 1,2,11,12,21,22,31,32,45; MP 3,4,13,14,23,
// 24,33,34; PP 6,16,26,36,46; MH 5,15,25,35; MS 8,18,28,38,44; MB 7,17,27,
// 37; C 9,19,29,39,43; 41 between the metacarpal shafts of digits I and II;
// 42 between metacarpal shaft and base of digit II).
constexpr PlanformSensor kSensorTableV1[] = {
    // branch V (digit V, little finger)
    {1, Anatomy::DP, -32.0, 147.0},
    {2, Anatomy::DP, -22.0, 147.0},
    {3, Anatomy::MP, -32.0, 134.0},
    {4, Anatomy::MP, -22.0, 134.0},
    {5, Anatomy::MH, -27.0, 90.0},
    {6, Anatomy::PP, -27.0, 112.0},
    {7, Anatomy::MB, -32.0, 38.0},
    {8, Anatomy::MS, -30.0, 65.0},
    {9, Anatomy::C, -20.0, 15.0},
    // branch IV (ring finger)
    {11, Anatomy::DP, -14.0, 164.0},
    {12, Anatomy::DP, -4.0, 164.0},
    {13, Anatomy::MP, -14.0, 146.0},
    {14, Anatomy::MP, -4.0, 146.0},
    {15, Anatomy::MH, -9.0, 90.0},
    {16, Anatomy::PP, -9.0, 115.0},
    {17, Anatomy::MB, -11.0, 38.0},
    {18, Anatomy::MS, -10.0, 65.0},
    {19, Anatomy::C, -7.0, 15.0},
    // branch III (middle finger)
    {21, Anatomy::DP, 4.0, 168.0},
    {22, Anatomy::DP, 14.0, 168.0},
    {23, Anatomy::MP, 4.0, 150.0},
    {24, Anatomy::MP, 14.0, 150.0},
    {25, Anatomy::MH, 9.0, 90.0},
    {26, Anatomy::PP, 9.0, 117.0},
    {27, Anatomy::MB, 9.0, 38.0},
    {28, Anatomy::MS, 9.0, 65.0},
    {29, Anatomy::C, 4.0, 15.0},
    // branch II (index finger)
    {31, Anatomy::DP, 22.0, 162.0},
    {32, Anatomy::DP, 32.0, 162.0},
    {33, Anatomy::MP, 22.0, 144.0},
    {34, Anatomy::MP, 32.0, 144.0},
    {35, Anatomy::MH, 27.0, 90.0},
    {36, Anatomy::PP, 27.0, 114.0},
    {37, Anatomy::MB, 30.0, 38.0},
    {38, Anatomy::MS, 28.0, 65.0},
    {39, Anatomy::C, 16.0, 15.0},
    // branch I (thumb)
    {41, Anatomy::InterMS_I_II, 36.0, 52.0},
    {42, Anatomy::MS_MB_II, 29.0, 52.0},
    {43, Anatomy::C, 30.0, 18.0},
    {44, Anatomy::MS, 44.0, 40.0},
    {45, Anatomy::DP, 74.0, 83.0},
    {46, Anatomy::PP, 58.0, 60.0},
};

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Distance in the plane from (x, y) to the thumb axis segment, plus the
// normalized position along the axis (0 at the base, 1 at the tip).
void thumb_axis_coords(double x, double y, double& dist, double& along) {
    const double ax = kThumbB.x - kThumbA.x;
    const double ay = kThumbB.y - kThumbA.y;
    const double len2 = ax * ax + ay * ay;
    double t = ((x - kThumbA.x) * ax + (y - kThumbA.y) * ay) / len2;
    along = clamp01(t);
    const double cx = kThumbA.x + along * ax;
    const double cy = kThumbA.y + along * ay;
    dist = std::hypot(x - cx, y - cy);
}

double palm_height(double x, double y) {
    const double u = x / 52.0;
    const double v = (y - 50.0) / 65.0;
    return 11.0 * std::exp(-u * u - v * v);
}

double finger_height(const FingerLane& lane, double x, double y) {
    if (std::abs(x - lane.center_x) > kLaneHalfWidth || y > lane.tip_y) return 0.0;
    const double ramp = clamp01((y - 90.0) / 5.0);
    const double taper =
        1.0 - 0.3 * clamp01((y - kLaneStartY) / (lane.tip_y - kLaneStartY));
    const double u = (x - lane.center_x) / 8.0;
    const double crown = std::sqrt(std::max(0.0, 1.0 - u * u));
    return ramp * taper * (2.5 + 7.5 * crown);
}

double thumb_height(double x, double y) {
    double dist, along;
    thumb_axis_coords(x, y, dist, along);
    if (dist > kThumbHalfWidth) return 0.0;
    const double taper = 1.0 - 0.25 * along;
    const double u = dist / 9.5;
    const double crown = std::sqrt(std::max(0.0, 1.0 - u * u));
    return taper * (2.5 + 8.5 * crown);
}

bool in_palm(double x, double y) {
    return x >= kPalmMinX && x <= kPalmMaxX && y >= kPalmMinY && y <= kPalmMaxY;
}

const FingerLane* lane_at(double x, double y) {
    for (const auto& lane : kLanes)
        if (std::abs(x - lane.center_x) <= kLaneHalfWidth && y >= kLaneStartY &&
            y <= lane.tip_y)
            return &lane;
    return nullptr;
}

bool in_thumb(double x, double y) {
    double dist, along;
    thumb_axis_coords(x, y, dist, along);
    return dist <= kThumbHalfWidth;
}

} // namespace

double dorsum_height(double x, double y) {
    double z = palm_height(x, y);
    for (const auto& lane : kLanes) z = std::max(z, finger_height(lane, x, y));
    z = std::max(z, thumb_height(x, y));
    return z;
}

Vec3 dorsum_normal(double x, double y) {
    const double h = 0.5;
    const double dzdx = (dorsum_height(x + h, y) - dorsum_height(x - h, y)) / (2.0 * h);
    const double dzdy = (dorsum_height(x, y + h) - dorsum_height(x, y - h)) / (2.0 * h);
    return Vec3{-dzdx, -dzdy, 1.0}.normalized();
}

Region region_for_digit(Digit d) { return static_cast<Region>(d); }

SensorConfig default_config(double hand_scale) {
    if (!(hand_scale >= 0.5 && hand_scale <= 2.0))
        throw ConfigError("hand_scale must lie in [0.5, 2.0]");
    std::vector<SensorPose> sensors;
    sensors.reserve(42);
    for (const auto& row : kSensorTableV1) {
        SensorPose p;
        p.id = row.id;
        p.anatomy = row.anatomy;
        p.position = Vec3{row.x, row.y, dorsum_height(row.x, row.y)} * hand_scale;
        // Sensor sits flush on the skin: local z along the outward normal,
        // local y as distal as the surface allows.
        const Vec3 ez = dorsum_normal(row.x, row.y);
        const Vec3 yref{0.0, 1.0, 0.0};
        const Vec3 ey = (yref - ez * yref.dot(ez)).normalized();
        const Vec3 ex = ey.cross(ez);
        p.orientation = Mat3::from_columns(ex, ey, ez);
        sensors.push_back(p);
    }
    return SensorConfig(std::move(sensors), kAllBranches);
}

HandFixture make_hand_fixture(double hand_scale) {
    if (!(hand_scale >= 0.5 && hand_scale <= 2.0))
        throw ConfigError("hand_scale must lie in [0.5, 2.0]");
    HandFixture fx;
    const double pitch = 1.6;
    const int nx = 81, ny = 114;
    for (int iy = 0; iy < ny; ++iy) {
        const double y = iy * pitch;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = -40.0 + ix * pitch;
            const FingerLane* lane = lane_at(x, y);
            const bool palm = in_palm(x, y);
            const bool thumb = in_thumb(x, y);
            if (!palm && !lane && !thumb) continue;
            fx.points.push_back(Vec3{x, y, dorsum_height(x, y)} * hand_scale);
            Region region = kRegionPalm;
            if (lane && y > kPalmMaxY)
                region = region_for_digit(lane->digit);
            else if (thumb && x > kPalmMaxX)
                region = region_for_digit(Digit::I);
            fx.regions.push_back(region);
        }
    }
    return fx;
}

Vec3 digit_tip_position(Digit d, double hand_scale) {
    double x = 0.0, y = 0.0;
    if (d == Digit::I) {
        x = 76.2;
        y = 85.6;
    } else {
        for (const auto& lane : kLanes)
            if (lane.digit == d) {
                x = lane.center_x;
                y = lane.tip_y - 2.0;
            }
    }
    return Vec3{x, y, dorsum_height(x, y)} * hand_scale;
}

} // namespace handwave
