#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "handwave/errors.hpp"
#include "handwave/geometry.hpp"

namespace handwave {

/// Anatomical site a sensor is glued to.
enum class Anatomy : std::uint8_t {
    DP,            // distal phalanx
    MP,            // middle phalanx
    PP,            // proximal phalanx
    MH,            // metacarpal head
    MS,            // metacarpal shaft
    MB,            // metacarpal base
    C,             // carpals
    InterMS_I_II,  // between the metacarpal shafts of digits I and II
    MS_MB_II       // between metacarpal shaft and base of digit II
};

const char* anatomy_name(Anatomy a);
Anatomy anatomy_from_name(const std::string& name);

/// Digits, numbered as on the hand (I = thumb ... V = little finger).
enum class Digit : std::uint8_t { I = 1, II = 2, III = 3, IV = 4, V = 5 };

const char* digit_name(Digit d);

/// Bitmask of present branches; bit (digit-1) set means the branch is mounted.
using BranchMask = std::uint8_t;
constexpr BranchMask kAllBranches = 0x1F;

constexpr bool branch_present(BranchMask mask, Digit d) {
    return (mask >> (static_cast<int>(d) - 1)) & 1;
}

/// Branch a sensor id belongs to. Valid ids: 1-9, 11-19, 21-29, 31-39, 41-46.
Digit branch_of(int sensor_id);
bool valid_sensor_id(int sensor_id);

/// Pose of one accelerometer: position (mm, hand frame) plus the rotation
/// whose columns are the sensor's local x/y/z axes expressed in the hand
/// frame. Hand frame: origin at the wrist center, x across the palm toward
/// the thumb, y toward the fingertips, z out of the dorsum.
struct SensorPose {
    int id = 0;
    Vec3 position;       // mm
    Mat3 orientation;    // orthonormal, det +1
    Anatomy anatomy = Anatomy::C;

    Digit branch() const { return branch_of(id); }
};

/// Full array configuration: up to 42 poses over up to five branches.
class SensorConfig {
public:
    SensorConfig() = default;
    SensorConfig(std::vector<SensorPose> sensors, BranchMask branches);

    const std::vector<SensorPose>& sensors() const { return sensors_; }
    BranchMask branches() const { return branches_; }
    std::size_t size() const { return sensors_.size(); }

    const SensorPose& pose(int sensor_id) const;
    const SensorPose* find(int sensor_id) const;

    /// Ascending present sensor ids.
    std::vector<int> sensor_ids() const;

    /// Copy with only the given branches present.
    SensorConfig with_branches(BranchMask mask) const;

    /// Checks id uniqueness/validity, branch partition and orientation
    /// orthonormality (tolerance 1e-9). Throws ConfigError on violation.
    void validate() const;

private:
    std::vector<SensorPose> sensors_;
    BranchMask branches_ = 0;
};

/// Versioned text serialization (one sensor per line).
void save_config(const SensorConfig& config, std::ostream& out);
void save_config_file(const SensorConfig& config, const std::string& path);
SensorConfig load_config(std::istream& in);
SensorConfig load_config_file(const std::string& path);

/// Selectable accelerometer full-scale setting.
enum class FullScale : std::uint8_t { G2 = 2, G4 = 4, G6 = 6, G8 = 8, G16 = 16 };

FullScale full_scale_from_g(int range_g);

/// Sensitivity in g per count for a full-scale setting. Endpoints follow the
/// device datasheet (0.06 mg/count at +/-2 g, 0.73 mg/count at +/-16 g);
/// the intermediate ranges scale proportionally with full scale
/// (+/-4 -> 0.12, +/-6 -> 0.18, +/-8 -> 0.24 mg/count).
double sensitivity_g_per_count(FullScale range);

/// Largest count magnitude the device emits at a given range: the 16-bit
/// limit or the count at which the physical full scale saturates, whichever
/// is smaller.
int max_count(FullScale range);

enum class Unit : std::uint8_t { RawCounts, G, MetersPerSecondSquared };

/// One frame: a value per present sensor, aligned with the id list of the
/// owning FrameStream. `t` is the frame counter (time = t / rate).
struct Sample {
    std::uint32_t t = 0;
    std::vector<Vec3> values;
    Unit unit = Unit::RawCounts;
    FullScale range = FullScale::G2;
};

/// Raw count -> g for one axis value.
double count_to_g(double count, FullScale range);
/// Raw count -> m/s^2 for one axis value.
double count_to_ms2(double count, FullScale range);

/// Calibrate a raw-counts sample into m/s^2. Throws CalibrationError if the
/// sample is not in raw counts.
Sample calibrate(const Sample& raw);

/// Ordered frames for a set of present sensors at a fixed rate.
struct FrameStream {
    double rate = 1310.0;            // frames per second
    FullScale range = FullScale::G2;
    std::vector<int> sensor_ids;     // ascending
    std::vector<Sample> frames;      // t strictly increasing

    std::size_t sensor_index(int sensor_id) const;
    double sample_period() const { return 1.0 / rate; }

    /// Per-frame t strictly increasing, each frame covering every sensor.
    void validate() const;
};

/// Calibrate every frame of a raw stream into m/s^2.
FrameStream calibrate_stream(const FrameStream& raw);

} // namespace handwave
