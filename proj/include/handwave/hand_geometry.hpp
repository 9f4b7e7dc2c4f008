#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "handwave/core_types.hpp"
#include "handwave/hand_model.hpp"

namespace handwave {

/// Hand surface as a point cloud with a neighbor graph supporting geodesic
/// (shortest-path) distance queries. Immutable after construction.
class HandSurface {
public:
    /// Build a k-nearest-neighbor graph over the points (Euclidean edge
    /// weights, symmetrized). If the graph is disconnected, k is doubled
    /// until it connects; the final k is recorded. Throws GeometryError for
    /// fewer than 4 points or degenerate (coplanar-collapsed) input.
    static HandSurface build(std::vector<Vec3> points, int k = 8);
    static HandSurface build(std::vector<Vec3> points, std::vector<Region> regions,
                             int k = 8);

    std::size_t vertex_count() const { return points_.size(); }
    const std::vector<Vec3>& points() const { return points_; }
    const std::vector<Region>& regions() const { return regions_; }
    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adjacency() const {
        return adjacency_;
    }

    /// k actually used (>= requested k when connectivity forced an increase).
    int effective_k() const { return effective_k_; }
    bool k_was_increased() const { return k_increased_; }

    /// Geodesic distance between two vertices (mm). Throws GeometryError on
    /// invalid indices or unreachable pairs.
    double geodesic(std::uint32_t a, std::uint32_t b) const;

    /// Single-source geodesic distance field (mm) to every vertex.
    std::vector<double> distance_field(std::uint32_t source) const;

    /// Uniform scale: multiplies every coordinate (hence every geodesic
    /// distance) by gamma.
    HandSurface scaled(double gamma) const;

    /// Index of the vertex nearest to a point, and its distance.
    std::pair<std::uint32_t, double> nearest_vertex(const Vec3& p) const;

private:
    std::vector<Vec3> points_;
    std::vector<Region> regions_;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency_;
    int effective_k_ = 0;
    bool k_increased_ = false;
};

/// Map of sensor id -> anchor vertex on the surface.
using SensorAnchors = std::map<int, std::uint32_t>;

/// Snap every sensor of the config to its nearest surface vertex. Throws
/// RegistrationError (naming the sensor) if any snap distance exceeds
/// max_snap_mm, or if two sensors land on the same vertex.
SensorAnchors register_sensors(const HandSurface& surface, const SensorConfig& config,
                               double max_snap_mm = 10.0);

/// Worst sensor-to-anchor snap distance for a registration.
double max_snap_distance(const HandSurface& surface, const SensorConfig& config,
                         const SensorAnchors& anchors);

/// Precomputed geodesic distance fields from every sensor anchor;
/// field(sensor, vertex) in mm.
class SensorDistanceFields {
public:
    SensorDistanceFields() = default;
    SensorDistanceFields(const HandSurface& surface, const SensorAnchors& anchors);

    const std::vector<int>& sensor_ids() const { return sensor_ids_; }
    std::size_t vertex_count() const { return vertex_count_; }
    double distance(std::size_t sensor_index, std::uint32_t vertex) const {
        return fields_[sensor_index][vertex];
    }
    const std::vector<double>& field(std::size_t sensor_index) const {
        return fields_[sensor_index];
    }

    void save(const std::string& path) const;
    static SensorDistanceFields load(const std::string& path);

private:
    std::vector<int> sensor_ids_;
    std::size_t vertex_count_ = 0;
    std::vector<std::vector<double>> fields_;
};

// Point-cloud file formats. PLY is ascii with float x/y/z properties and an
// optional uchar region property; XYZ is whitespace-separated coordinates.
HandFixture load_ply(const std::string& path);
void save_ply(const HandFixture& fixture, const std::string& path);
std::vector<Vec3> load_xyz(const std::string& path);

/// Load a point cloud by extension (.ply or .xyz); "builtin" yields the
/// bundled procedural fixture.
HandFixture load_point_cloud(const std::string& path);

} // namespace handwave
