#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "handwave/hand_geometry.hpp"
#include "handwave/reconstruction.hpp"

namespace handwave {

/// Soft-tissue mechanics in SI units plus the distance-damping law.
struct TissueParams {
    double elastic_modulus_pa = 0.13e6;
    double density_kg_m3 = 1020.0;
    double poisson_ratio = 0.5;
    PhiParams damping; // amplitude-vs-distance law, normalized to 1 at d = 0

    /// Shear wave speed v_s = sqrt(E / (2 rho (1 + mu))), m/s.
    double shear_wave_speed() const;
};

/// Wavelength v_s / f in millimeters.
double wavelength_mm(const TissueParams& params, double frequency_hz);

/// Device bandwidth ceiling for stimulus frequencies.
constexpr double kMaxStimulusHz = 800.0;

/// Point contact stimulus at a surface vertex.
struct ContactEvent {
    enum class Waveform { Sinusoid, Transient };

    std::uint32_t source_vertex = 0;
    Waveform waveform = Waveform::Sinusoid;
    double frequency_hz = 100.0;
    double amplitude_ms2 = 1.0;
    double onset_s = 0.0;
    double duration_s = 1.0;
    double decay_tau_s = 0.02; // Transient only: exponential envelope

    void validate() const; // throws SimulationError on bad parameters
};

/// Analytic damped traveling wave: every vertex sees the source waveform
/// delayed by geodesic distance over the shear speed and scaled by the
/// damping law (normalized to 1 at the source). Requires duration to cover
/// the event span plus the farthest propagation delay.
WaveField propagate(const HandSurface& surface, const ContactEvent& event,
                    const TissueParams& params, double duration_s,
                    double rate = 1310.0);

struct SamplingOptions {
    FullScale range = FullScale::G4;
    double noise_g = 0.5e-3;  // Gaussian, g RMS per axis
    std::uint64_t seed = 0;
    bool with_gravity = true;
};

/// Virtual acquisition: the surface-normal motion at each sensor anchor is
/// rotated into the sensor's local axes, gravity reaction is added, Gaussian
/// noise applied, and the result quantized to raw counts at the given range
/// (saturating at the physical full scale). Field rate must be >= 1310.
FrameStream sample_sensors(const WaveField& field, const SensorConfig& config,
                           const SensorAnchors& anchors,
                           const SamplingOptions& opts = {});

/// Quantize one acceleration (m/s^2) to a count and back; used by the
/// sampler and exposed for direct bound checks.
int quantize_count(double value_g, FullScale range);

/// Simulation scenario as read from a scenario file.
struct Scenario {
    int schema = 1;
    std::optional<int> source_sensor;        // anchor of this sensor is the source
    std::optional<std::uint32_t> source_vertex;
    ContactEvent::Waveform waveform = ContactEvent::Waveform::Sinusoid;
    double frequency_hz = 100.0;
    double amplitude_ms2 = 5.0;
    double onset_s = 0.1;
    double duration_s = 1.0;
    double decay_tau_s = 0.02;
    double sim_seconds = 1.5;
    double rate_hz = 1310.0;
    double noise_g = 0.5e-3;
    std::uint64_t seed = 1;
    int range_g = 4;
    double hand_scale = 1.0;
};

/// Parse a flat key = value scenario file ('#' comments, strings optionally
/// quoted). Unknown keys are errors; see docs/file-formats.md for the schema.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::istream& in, const std::string& origin);

} // namespace handwave
