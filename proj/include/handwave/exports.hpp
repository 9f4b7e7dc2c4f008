#pragma once

#include <string>
#include <vector>

#include "handwave/hand_geometry.hpp"
#include "handwave/signal_ops.hpp"

namespace handwave {

/// Scalar channels as CSV: "# rate_hz <r>" comment, then a header row of
/// sensor ids and one row per frame with the time in seconds first.
void save_channels_csv(const std::vector<ScalarChannel>& channels, double rate,
                       const std::string& path);

struct ChannelsCsv {
    std::vector<ScalarChannel> channels;
    double rate = 1310.0;
};

ChannelsCsv load_channels_csv(const std::string& path);

/// Raw counts as CSV: "# rate_hz" and "# range_g" comments, a header row of
/// <id>_x/<id>_y/<id>_z columns, one row per frame led by the frame counter.
void save_counts_csv(const FrameStream& stream, const std::string& path);
FrameStream load_counts_csv(const std::string& path);

/// Similarity matrix as CSV with gesture names on both axes.
void save_similarity_csv(const SimilarityMatrix& matrix, const std::string& path);

/// Per-vertex map as CSV rows "vertex,x,y,z,value".
void save_vertex_map_csv(const std::vector<Vec3>& points,
                         const std::vector<double>& values, const std::string& path);

/// Rasterize a per-vertex map onto the xy plane as an 8-bit PGM heatmap
/// (nearest vertex per pixel, black where no vertex projects).
void save_vertex_map_pgm(const std::vector<Vec3>& points,
                         const std::vector<double>& values, const std::string& path,
                         double pixel_mm = 1.0);

} // namespace handwave
