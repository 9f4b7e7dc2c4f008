#include "handwave/wave_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "handwave/rng.hpp"

namespace handwave {

double TissueParams::shear_wave_speed() const {
    return std::sqrt(elastic_modulus_pa /
                     (2.0 * density_kg_m3 * (1.0 + poisson_ratio)));
}

double wavelength_mm(const TissueParams& params, double frequency_hz) {
    if (!(frequency_hz > 0.0)) throw SimulationError("frequency must be positive");
    return params.shear_wave_speed() / frequency_hz * 1000.0;
}

void ContactEvent::validate() const {
    if (!(frequency_hz > 0.0) || frequency_hz > kMaxStimulusHz)
        throw SimulationError("stimulus frequency must lie in (0, 800] Hz");
    if (!(amplitude_ms2 >= 0.0)) throw SimulationError("amplitude must be nonnegative");
    if (!(duration_s > 0.0)) throw SimulationError("event duration must be positive");
    if (onset_s < 0.0) throw SimulationError("onset must be nonnegative");
    if (waveform == Waveform::Transient && !(decay_tau_s > 0.0))
        throw SimulationError("transient decay must be positive");
}

namespace {

double event_value(const ContactEvent& event, double t) {
    const double u = t - event.onset_s;
    if (u < 0.0 || u > event.duration_s) return 0.0;
    const double carrier = std::sin(2.0 * kPi * event.frequency_hz * u);
    if (event.waveform == ContactEvent::Waveform::Sinusoid)
        return event.amplitude_ms2 * carrier;
    return event.amplitude_ms2 * std::exp(-u / event.decay_tau_s) * carrier;
}

} // namespace

WaveField propagate(const HandSurface& surface, const ContactEvent& event,
                    const TissueParams& params, double duration_s, double rate) {
    event.validate();
    if (!(rate > 0.0)) throw SimulationError("rate must be positive");
    if (event.source_vertex >= surface.vertex_count())
        throw SimulationError("source vertex is not on the surface");

    const std::vector<double> dist = surface.distance_field(event.source_vertex);
    const double v_s = params.shear_wave_speed();
    const double max_dist_mm = *std::max_element(dist.begin(), dist.end());
    const double max_delay_s = max_dist_mm / 1000.0 / v_s;
    if (duration_s < event.onset_s + event.duration_s + max_delay_s)
        throw SimulationError(
            "duration must cover the event span plus the farthest delay (need >= " +
            std::to_string(event.onset_s + event.duration_s + max_delay_s) + " s)");

    const double amp0 = rectified(params.damping.phi(0.0));
    if (!(amp0 > 0.0))
        throw SimulationError("damping law must be positive at zero distance");

    WaveField field;
    field.vertex_count = surface.vertex_count();
    field.frame_count = static_cast<std::size_t>(std::ceil(duration_s * rate));
    field.rate = rate;
    field.values.assign(field.vertex_count * field.frame_count, 0.0);

    const double dt = 1.0 / rate;
    for (std::uint32_t v = 0; v < field.vertex_count; ++v) {
        const double amp = rectified(params.damping.phi(dist[v])) / amp0;
        if (amp == 0.0) continue;
        const double delay = dist[v] / 1000.0 / v_s;
        double* row = &field.values[v * field.frame_count];
        for (std::size_t k = 0; k < field.frame_count; ++k)
            row[k] = amp * event_value(event, k * dt - delay);
    }
    return field;
}

int quantize_count(double value_g, FullScale range) {
    const double sens = sensitivity_g_per_count(range);
    const int limit = max_count(range);
    const double counts = std::round(value_g / sens);
    return static_cast<int>(std::min<double>(limit, std::max<double>(-limit, counts)));
}

FrameStream sample_sensors(const WaveField& field, const SensorConfig& config,
                           const SensorAnchors& anchors, const SamplingOptions& opts) {
    if (field.rate < 1310.0)
        throw SimulationError("field rate below 1310 frames/s; resample first");
    for (const auto& sensor : config.sensors())
        if (anchors.find(sensor.id) == anchors.end())
            throw SimulationError("missing anchor for sensor " +
                                  std::to_string(sensor.id));

    FrameStream stream;
    stream.rate = field.rate;
    stream.range = opts.range;
    stream.sensor_ids = config.sensor_ids();
    stream.frames.reserve(field.frame_count);

    GaussianRng rng(opts.seed);
    const Vec3 gravity_reaction{0.0, 0.0, opts.with_gravity ? 1.0 : 0.0}; // g units

    for (std::size_t t = 0; t < field.frame_count; ++t) {
        Sample frame;
        frame.t = static_cast<std::uint32_t>(t);
        frame.unit = Unit::RawCounts;
        frame.range = opts.range;
        frame.values.reserve(stream.sensor_ids.size());
        for (int id : stream.sensor_ids) {
            const SensorPose& pose = config.pose(id);
            const std::uint32_t anchor = anchors.at(id);
            // Surface motion along the outward normal (the sensor's local z).
            const Vec3 normal = pose.orientation.col(2);
            const Vec3 world = normal * field.at(anchor, t);
            Vec3 local_g = pose.orientation.tmul(world) / kGravity;
            local_g += pose.orientation.tmul(Vec3{0, 0, gravity_reaction.z});
            Vec3 counts;
            for (int axis = 0; axis < 3; ++axis) {
                double v = local_g[axis];
                if (opts.noise_g > 0.0) v += opts.noise_g * rng.gaussian();
                counts[axis] = quantize_count(v, opts.range);
            }
            frame.values.push_back(counts);
        }
        stream.frames.push_back(std::move(frame));
    }
    return stream;
}

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

double to_number(const std::string& value, const std::string& key,
                 const std::string& origin) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw IoError(origin + ": value of '" + key + "' is not a number: " + value);
    }
}

} // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Scenario sc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = strip(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = unquote(strip(line.substr(eq + 1)));

        if (key == "schema") {
            sc.schema = static_cast<int>(to_number(value, key, origin));
            if (sc.schema != 1)
                throw IoError(origin + ": unsupported scenario schema " + value);
        } else if (key == "source_sensor") {
            sc.source_sensor = static_cast<int>(to_number(value, key, origin));
        } else if (key == "source_vertex") {
            sc.source_vertex =
                static_cast<std::uint32_t>(to_number(value, key, origin));
        } else if (key == "waveform") {
            if (value == "sinusoid") sc.waveform = ContactEvent::Waveform::Sinusoid;
            else if (value == "transient") sc.waveform = ContactEvent::Waveform::Transient;
            else throw IoError(origin + ": unknown waveform '" + value + "'");
        } else if (key == "frequency_hz") {
            sc.frequency_hz = to_number(value, key, origin);
        } else if (key == "amplitude_ms2") {
            sc.amplitude_ms2 = to_number(value, key, origin);
        } else if (key == "onset_s") {
            sc.onset_s = to_number(value, key, origin);
        } else if (key == "duration_s") {
            sc.duration_s = to_number(value, key, origin);
        } else if (key == "decay_tau_s") {
            sc.decay_tau_s = to_number(value, key, origin);
        } else if (key == "sim_seconds") {
            sc.sim_seconds = to_number(value, key, origin);
        } else if (key == "rate_hz") {
            sc.rate_hz = to_number(value, key, origin);
        } else if (key == "noise_g") {
            sc.noise_g = to_number(value, key, origin);
        } else if (key == "seed") {
            sc.seed = static_cast<std::uint64_t>(to_number(value, key, origin));
        } else if (key == "range_g") {
            sc.range_g = static_cast<int>(to_number(value, key, origin));
        } else if (key == "hand_scale") {
            sc.hand_scale = to_number(value, key, origin);
        } else {
            throw IoError(origin + ": unknown scenario key '" + key + "'");
        }
    }
    if (!sc.source_sensor && !sc.source_vertex)
        throw IoError(origin + ": scenario needs source_sensor or source_vertex");
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    return parse_scenario(in, path);
}

} // namespace handwave
