#include "handwave/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace handwave {

double PhiParams::phi(double distance_mm) const {
    return numerator / (distance_mm + alpha) - c_offset;
}

double PhiParams::zero_crossing_mm() const {
    if (c_offset <= 0.0) return std::numeric_limits<double>::infinity();
    return numerator / c_offset - alpha;
}

double rectified(double phi) { return phi >= 0.0 ? phi : 0.0; }

WeightField::WeightField(const SensorDistanceFields& distances, const PhiParams& params,
                         bool rectify)
    : sensor_ids_(distances.sensor_ids()),
      vertex_count_(distances.vertex_count()),
      params_(params),
      rectify_(rectify) {
    if (!(params.alpha > 0.0))
        throw ReconstructionError("weighting parameter alpha must be positive");
    const std::size_t ns = sensor_ids_.size();
    weights_.assign(vertex_count_ * ns, 0.0);
    totals_.assign(vertex_count_, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
        const auto& field = distances.field(s);
        for (std::uint32_t v = 0; v < vertex_count_; ++v) {
            double w = params.phi(field[v]);
            if (rectify_) w = rectified(w);
            weights_[v * ns + s] = w;
            totals_[v] += w;
        }
    }
}

std::vector<std::uint32_t> WeightField::orphan_vertices() const {
    std::vector<std::uint32_t> orphans;
    for (std::uint32_t v = 0; v < vertex_count_; ++v)
        if (!(totals_[v] > 0.0)) orphans.push_back(v);
    return orphans;
}

namespace {

void require_no_orphans(const WeightField& weights) {
    const auto orphans = weights.orphan_vertices();
    if (orphans.empty()) return;
    std::string msg = "reconstruction undefined at " + std::to_string(orphans.size()) +
                      " vertex(es) with zero total weight:";
    for (std::size_t i = 0; i < orphans.size() && i < 8; ++i)
        msg += " " + std::to_string(orphans[i]);
    if (orphans.size() > 8) msg += " ...";
    throw ReconstructionError(msg);
}

} // namespace

WaveField reconstruct(const std::vector<ScalarChannel>& channels,
                      const WeightField& weights, double rate) {
    const std::size_t ns = weights.sensor_ids().size();
    if (channels.size() != ns)
        throw ReconstructionError("channel count does not match the weight field");
    for (std::size_t s = 0; s < ns; ++s)
        if (channels[s].id != weights.sensor_ids()[s])
            throw ReconstructionError("channel ids do not match the weight field");
    if (channels.empty() || channels[0].samples.empty())
        throw ReconstructionError("no samples to reconstruct");
    const std::size_t frames = channels[0].samples.size();
    for (const auto& ch : channels)
        if (ch.samples.size() != frames)
            throw ReconstructionError("channels have unequal lengths");
    require_no_orphans(weights);

    WaveField field;
    field.vertex_count = weights.vertex_count();
    field.frame_count = frames;
    field.rate = rate;
    field.values.assign(field.vertex_count * frames, 0.0);
    for (std::uint32_t v = 0; v < field.vertex_count; ++v) {
        const double inv_total = 1.0 / weights.total_weight(v);
        double* row = &field.values[v * frames];
        for (std::size_t s = 0; s < ns; ++s) {
            const double w = weights.weight(s, v) * inv_total;
            if (w == 0.0) continue;
            const double* src = channels[s].samples.data();
            for (std::size_t t = 0; t < frames; ++t) row[t] += w * src[t];
        }
    }
    return field;
}

std::array<WaveField, 3> reconstruct_vector(
    const std::vector<int>& sensor_ids,
    const std::vector<std::vector<Vec3>>& vector_channels, const WeightField& weights,
    double rate) {
    std::array<WaveField, 3> out;
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<ScalarChannel> scalars(vector_channels.size());
        for (std::size_t s = 0; s < vector_channels.size(); ++s) {
            scalars[s].id = sensor_ids[s];
            scalars[s].samples.reserve(vector_channels[s].size());
            for (const auto& v : vector_channels[s]) scalars[s].samples.push_back(v[axis]);
        }
        out[static_cast<std::size_t>(axis)] = reconstruct(scalars, weights, rate);
    }
    return out;
}

std::vector<double> rms_surface_map(const WaveField& field, double window_ms) {
    const std::size_t w = rms_window_samples(window_ms, field.rate);
    if (w == 0) throw ProcessingError("RMS window shorter than one sample");
    if (w > field.frame_count)
        throw ProcessingError("RMS window longer than the field duration");
    std::vector<double> map(field.vertex_count, 0.0);
    for (std::uint32_t v = 0; v < field.vertex_count; ++v) {
        const double* row = &field.values[v * field.frame_count];
        double acc = 0.0;
        for (std::size_t t = field.frame_count - w; t < field.frame_count; ++t)
            acc += row[t] * row[t];
        map[v] = std::sqrt(acc / static_cast<double>(w));
    }
    return map;
}

void save_wave_field(const WaveField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write wave field: " + path);
    const char magic[4] = {'W', 'H', 'F', '1'};
    out.write(magic, 4);
    const std::uint32_t nv = static_cast<std::uint32_t>(field.vertex_count);
    const std::uint32_t nf = static_cast<std::uint32_t>(field.frame_count);
    out.write(reinterpret_cast<const char*>(&nv), 4);
    out.write(reinterpret_cast<const char*>(&nf), 4);
    out.write(reinterpret_cast<const char*>(&field.rate), 8);
    for (std::size_t t = 0; t < field.frame_count; ++t)
        for (std::uint32_t v = 0; v < field.vertex_count; ++v) {
            const float f = static_cast<float>(field.at(v, t));
            out.write(reinterpret_cast<const char*>(&f), 4);
        }
}

WaveField load_wave_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open wave field: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "WHF1", 4) != 0)
        throw IoError("not a wave-field file: " + path);
    std::uint32_t nv = 0, nf = 0;
    double rate = 0.0;
    in.read(reinterpret_cast<char*>(&nv), 4);
    in.read(reinterpret_cast<char*>(&nf), 4);
    in.read(reinterpret_cast<char*>(&rate), 8);
    if (!in || !(rate > 0.0) || !std::isfinite(rate) ||
        static_cast<std::uint64_t>(nv) * nf > (1ULL << 31))
        throw IoError("wave-field header is implausible: " + path);
    WaveField field;
    field.vertex_count = nv;
    field.frame_count = nf;
    field.rate = rate;
    field.values.assign(static_cast<std::size_t>(nv) * nf, 0.0);
    for (std::size_t t = 0; t < nf; ++t)
        for (std::uint32_t v = 0; v < nv; ++v) {
            float f = 0.0F;
            in.read(reinterpret_cast<char*>(&f), 4);
            field.at(v, t) = f;
        }
    if (!in) throw IoError("truncated wave-field file: " + path);
    return field;
}

void save_wave_field_frame_csv(const WaveField& field, std::size_t frame,
                               const std::string& path) {
    if (frame >= field.frame_count) throw IoError("frame index out of range");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV: " + path);
    out << "vertex,value\n";
    char buf[64];
    for (std::uint32_t v = 0; v < field.vertex_count; ++v) {
        std::snprintf(buf, sizeof(buf), "%u,%.10g\n", v, field.at(v, frame));
        out << buf;
    }
}

} // namespace handwave
