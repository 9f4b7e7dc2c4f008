#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "handwave/hand_geometry.hpp"
#include "handwave/signal_ops.hpp"

namespace handwave {

/// Distance-weighting law parameters. numerator and alpha are in mm (they
/// scale together with the surface), c_offset is dimensionless. Defaults are
/// the physiological fit used throughout.
struct PhiParams {
    double numerator = 17.0;
    double alpha = 25.5;   // mm
    double c_offset = 8.7e-2;

    /// phi(d) = numerator / (d + alpha) - c_offset.
    double phi(double distance_mm) const;

    /// Geodesic distance beyond which the rectified weight is zero.
    double zero_crossing_mm() const;

    /// Same weights on a gamma-scaled surface.
    PhiParams scaled(double gamma) const {
        return {numerator * gamma, alpha * gamma, c_offset};
    }
};

/// Half-wave rectification: negative weights clamp to zero.
double rectified(double phi);

/// Per-vertex, per-sensor interpolation weights over a surface.
class WeightField {
public:
    /// Evaluate the weighting law on the precomputed distance fields.
    /// Throws ReconstructionError for alpha <= 0.
    WeightField(const SensorDistanceFields& distances, const PhiParams& params,
                bool rectify = true);

    std::size_t vertex_count() const { return vertex_count_; }
    const std::vector<int>& sensor_ids() const { return sensor_ids_; }
    bool rectify() const { return rectify_; }
    const PhiParams& params() const { return params_; }

    /// Raw weight f(phi) of a sensor at a vertex.
    double weight(std::size_t sensor_index, std::uint32_t vertex) const {
        return weights_[vertex * sensor_ids_.size() + sensor_index];
    }

    /// Sum of raw weights at a vertex.
    double total_weight(std::uint32_t vertex) const { return totals_[vertex]; }

    /// Vertices whose total weight is not positive (cannot be interpolated).
    std::vector<std::uint32_t> orphan_vertices() const;

private:
    std::vector<int> sensor_ids_;
    std::size_t vertex_count_ = 0;
    std::vector<double> weights_; // vertex-major [vertex][sensor]
    std::vector<double> totals_;
    PhiParams params_;
    bool rectify_ = true;
};

/// Scalar (or componentwise vector) acceleration over surface vertices and
/// time, stored vertex-major.
struct WaveField {
    std::size_t vertex_count = 0;
    std::size_t frame_count = 0;
    double rate = 1310.0;
    std::vector<double> values; // [vertex * frame_count + frame]

    double at(std::uint32_t vertex, std::size_t frame) const {
        return values[vertex * frame_count + frame];
    }
    double& at(std::uint32_t vertex, std::size_t frame) {
        return values[vertex * frame_count + frame];
    }
};

/// Weighted-average interpolation of the sensor channels onto every vertex.
/// Weights are time-invariant; output rate equals the channel rate. Throws
/// ReconstructionError if any vertex has zero total weight (listing orphan
/// vertices) or if channels disagree with the weight field.
WaveField reconstruct(const std::vector<ScalarChannel>& channels,
                      const WeightField& weights, double rate);

/// Componentwise interpolation of per-sensor 3-vector channels; returns one
/// WaveField per axis (x, y, z).
std::array<WaveField, 3> reconstruct_vector(
    const std::vector<int>& sensor_ids,
    const std::vector<std::vector<Vec3>>& vector_channels, const WeightField& weights,
    double rate);

/// Per-vertex RMS over the trailing window (default 250 ms).
std::vector<double> rms_surface_map(const WaveField& field, double window_ms = 250.0);

// Wave-field container: "WHF1" magic, u32 vertex count, u32 frame count,
// f64 rate, then float32 values frame-major [frame][vertex].
void save_wave_field(const WaveField& field, const std::string& path);
WaveField load_wave_field(const std::string& path);

/// One frame of a field as CSV (vertex,value per line).
void save_wave_field_frame_csv(const WaveField& field, std::size_t frame,
                               const std::string& path);

} // namespace handwave
