#include "handwave/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace handwave {

namespace {
constexpr double kOrthoTol = 1e-9;
const char* const kConfigHeader = "handwave-config v1";
} // namespace

const char* anatomy_name(Anatomy a) {
    switch (a) {
        case Anatomy::DP: return "DP";
        case Anatomy::MP: return "MP";
        case Anatomy::PP: return "PP";
        case Anatomy::MH: return "MH";
        case Anatomy::MS: return "MS";
        case Anatomy::MB: return "MB";
        case Anatomy::C: return "C";
        case Anatomy::InterMS_I_II: return "InterMS_I_II";
        case Anatomy::MS_MB_II: return "MS_MB_II";
    }
    return "?";
}

Anatomy anatomy_from_name(const std::string& name) {
    static const std::map<std::string, Anatomy> table = {
        {"DP", Anatomy::DP}, {"MP", Anatomy::MP}, {"PP", Anatomy::PP},
        {"MH", Anatomy::MH}, {"MS", Anatomy::MS}, {"MB", Anatomy::MB},
        {"C", Anatomy::C},   {"InterMS_I_II", Anatomy::InterMS_I_II},
        {"MS_MB_II", Anatomy::MS_MB_II}};
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown anatomy label: " + name);
    return it->second;
}

const char* digit_name(Digit d) {
    switch (d) {
        case Digit::I: return "I";
        case Digit::II: return "II";
        case Digit::III: return "III";
        case Digit::IV: return "IV";
        case Digit::V: return "V";
    }
    return "?";
}

bool valid_sensor_id(int id) {
    if (id >= 1 && id <= 9) return true;
    if (id >= 11 && id <= 19) return true;
    if (id >= 21 && id <= 29) return true;
    if (id >= 31 && id <= 39) return true;
    if (id >= 41 && id <= 46) return true;
    return false;
}

Digit branch_of(int id) {
    if (id >= 1 && id <= 9) return Digit::V;
    if (id >= 11 && id <= 19) return Digit::IV;
    if (id >= 21 && id <= 29) return Digit::III;
    if (id >= 31 && id <= 39) return Digit::II;
    if (id >= 41 && id <= 46) return Digit::I;
    throw ConfigError("invalid sensor id: " + std::to_string(id));
}

SensorConfig::SensorConfig(std::vector<SensorPose> sensors, BranchMask branches)
    : sensors_(std::move(sensors)), branches_(branches) {
    std::sort(sensors_.begin(), sensors_.end(),
              [](const SensorPose& a, const SensorPose& b) { return a.id < b.id; });
    validate();
}

const SensorPose* SensorConfig::find(int sensor_id) const {
    for (const auto& s : sensors_)
        if (s.id == sensor_id) return &s;
    return nullptr;
}

const SensorPose& SensorConfig::pose(int sensor_id) const {
    const SensorPose* p = find(sensor_id);
    if (!p) throw ConfigError("sensor " + std::to_string(sensor_id) + " not present");
    return *p;
}

std::vector<int> SensorConfig::sensor_ids() const {
    std::vector<int> ids;
    ids.reserve(sensors_.size());
    for (const auto& s : sensors_) ids.push_back(s.id);
    return ids;
}

SensorConfig SensorConfig::with_branches(BranchMask mask) const {
    std::vector<SensorPose> kept;
    for (const auto& s : sensors_)
        if (branch_present(mask, s.branch())) kept.push_back(s);
    return SensorConfig(std::move(kept), static_cast<BranchMask>(branches_ & mask));
}

void SensorConfig::validate() const {
    std::set<int> seen;
    for (const auto& s : sensors_) {
        if (!valid_sensor_id(s.id))
            throw ConfigError("invalid sensor id: " + std::to_string(s.id));
        if (!seen.insert(s.id).second)
            throw ConfigError("duplicate sensor id: " + std::to_string(s.id));
        if (!branch_present(branches_, s.branch()))
            throw ConfigError("sensor " + std::to_string(s.id) +
                              " belongs to a branch marked absent");
        if (s.orientation.orthonormality_defect() > kOrthoTol)
            throw ConfigError("sensor " + std::to_string(s.id) +
                              " orientation is not orthonormal");
        if (std::abs(s.orientation.det() - 1.0) > kOrthoTol)
            throw ConfigError("sensor " + std::to_string(s.id) +
                              " orientation determinant is not +1");
    }
    // A present branch must be complete.
    static const std::pair<Digit, int> expected[] = {
        {Digit::V, 9}, {Digit::IV, 9}, {Digit::III, 9}, {Digit::II, 9}, {Digit::I, 6}};
    for (const auto& [digit, count] : expected) {
        if (!branch_present(branches_, digit)) continue;
        int n = 0;
        for (const auto& s : sensors_)
            if (s.branch() == digit) ++n;
        if (n != count)
            throw ConfigError(std::string("branch ") + digit_name(digit) + " has " +
                              std::to_string(n) + " sensors, expected " +
                              std::to_string(count));
    }
    if (branches_ == kAllBranches && sensors_.size() != 42)
        throw ConfigError("full configuration must contain exactly 42 sensors");
}

void save_config(const SensorConfig& config, std::ostream& out) {
    out << kConfigHeader << "\n";
    out << "branches " << static_cast<int>(config.branches()) << "\n";
    char buf[512];
    for (const auto& s : config.sensors()) {
        const Mat3& R = s.orientation;
        std::snprintf(buf, sizeof(buf),
                      "sensor %d %s %.6f %.6f %.6f "
                      "%.12f %.12f %.12f %.12f %.12f %.12f %.12f %.12f %.12f\n",
                      s.id, anatomy_name(s.anatomy), s.position.x, s.position.y,
                      s.position.z, R(0, 0), R(0, 1), R(0, 2), R(1, 0), R(1, 1),
                      R(1, 2), R(2, 0), R(2, 1), R(2, 2));
        out << buf;
    }
}

void save_config_file(const SensorConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config file: " + path);
    save_config(config, out);
}

SensorConfig load_config(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kConfigHeader)
        throw IoError("not a handwave config file (missing '" +
                      std::string(kConfigHeader) + "' header)");
    int branches = -1;
    std::vector<SensorPose> sensors;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "branches") {
            ls >> branches;
        } else if (tag == "sensor") {
            SensorPose p;
            std::string anat;
            ls >> p.id >> anat >> p.position.x >> p.position.y >> p.position.z;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) ls >> p.orientation(r, c);
            if (!ls) throw IoError("malformed sensor line: " + line);
            p.anatomy = anatomy_from_name(anat);
            sensors.push_back(p);
        } else {
            throw IoError("unknown config directive: " + tag);
        }
    }
    if (branches < 0 || branches > kAllBranches)
        throw IoError("config file missing a valid 'branches' line");
    return SensorConfig(std::move(sensors), static_cast<BranchMask>(branches));
}

SensorConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return load_config(in);
}

FullScale full_scale_from_g(int range_g) {
    switch (range_g) {
        case 2: return FullScale::G2;
        case 4: return FullScale::G4;
        case 6: return FullScale::G6;
        case 8: return FullScale::G8;
        case 16: return FullScale::G16;
        default:
            throw CalibrationError("unknown full-scale range: +/-" +
                                   std::to_string(range_g) + " g");
    }
}

double sensitivity_g_per_count(FullScale range) {
    switch (range) {
        case FullScale::G2: return 0.06e-3;
        case FullScale::G4: return 0.12e-3;
        case FullScale::G6: return 0.18e-3;
        case FullScale::G8: return 0.24e-3;
        case FullScale::G16: return 0.73e-3;
    }
    throw CalibrationError("unknown full-scale range");
}

int max_count(FullScale range) {
    const double sens = sensitivity_g_per_count(range);
    const double saturation = static_cast<double>(static_cast<int>(range)) / sens;
    return static_cast<int>(std::min(32767.0, std::floor(saturation)));
}

double count_to_g(double count, FullScale range) {
    return count * sensitivity_g_per_count(range);
}

double count_to_ms2(double count, FullScale range) {
    return count_to_g(count, range) * kGravity;
}

Sample calibrate(const Sample& raw) {
    if (raw.unit != Unit::RawCounts)
        throw CalibrationError("calibrate() expects a raw-counts sample");
    const double scale = sensitivity_g_per_count(raw.range) * kGravity;
    Sample out = raw;
    out.unit = Unit::MetersPerSecondSquared;
    for (auto& v : out.values) v *= scale;
    return out;
}

std::size_t FrameStream::sensor_index(int sensor_id) const {
    const auto it = std::lower_bound(sensor_ids.begin(), sensor_ids.end(), sensor_id);
    if (it == sensor_ids.end() || *it != sensor_id)
        throw ConfigError("sensor " + std::to_string(sensor_id) + " not in stream");
    return static_cast<std::size_t>(it - sensor_ids.begin());
}

void FrameStream::validate() const {
    if (rate <= 0.0) throw ConfigError("stream rate must be positive");
    if (!std::is_sorted(sensor_ids.begin(), sensor_ids.end()))
        throw ConfigError("stream sensor ids must be ascending");
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& f : frames) {
        if (f.values.size() != sensor_ids.size())
            throw ConfigError("frame " + std::to_string(f.t) +
                              " does not cover every present sensor");
        if (!first && f.t <= prev)
            throw ConfigError("frame counters must be strictly increasing");
        prev = f.t;
        first = false;
    }
}

FrameStream calibrate_stream(const FrameStream& raw) {
    FrameStream out = raw;
    for (auto& f : out.frames) f = calibrate(f);
    return out;
}

} // namespace handwave
