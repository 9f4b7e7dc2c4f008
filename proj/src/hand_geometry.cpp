#include "handwave/hand_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace handwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Uniform-cell spatial hash for k-nearest-neighbor queries.
class PointGrid {
public:
    PointGrid(const std::vector<Vec3>& pts, double cell) : pts_(pts), cell_(cell) {
        lo_ = pts[0];
        for (const auto& p : pts) {
            lo_.x = std::min(lo_.x, p.x);
            lo_.y = std::min(lo_.y, p.y);
            lo_.z = std::min(lo_.z, p.z);
        }
        for (std::uint32_t i = 0; i < pts.size(); ++i) cells_[key(pts[i])].push_back(i);
    }

    /// Indices of the k nearest points to pts[query], excluding itself.
    std::vector<std::uint32_t> knn(std::uint32_t query, int k) const {
        const Vec3& q = pts_[query];
        std::vector<std::pair<double, std::uint32_t>> found;
        int ring = 1;
        while (true) {
            found.clear();
            const int cx = coord(q.x - lo_.x), cy = coord(q.y - lo_.y), cz = coord(q.z - lo_.z);
            for (int dx = -ring; dx <= ring; ++dx)
                for (int dy = -ring; dy <= ring; ++dy)
                    for (int dz = -ring; dz <= ring; ++dz) {
                        const auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
                        if (it == cells_.end()) continue;
                        for (std::uint32_t idx : it->second) {
                            if (idx == query) continue;
                            found.emplace_back((pts_[idx] - q).norm2(), idx);
                        }
                    }
            // Neighbors are trustworthy only up to the covered radius.
            const double safe = ring * cell_;
            std::sort(found.begin(), found.end());
            std::size_t usable = 0;
            while (usable < found.size() && std::sqrt(found[usable].first) <= safe) ++usable;
            if (static_cast<int>(usable) >= k || found.size() >= pts_.size() - 1) {
                std::vector<std::uint32_t> out;
                const std::size_t take =
                    std::min<std::size_t>(static_cast<std::size_t>(k), found.size());
                for (std::size_t i = 0; i < take; ++i) out.push_back(found[i].second);
                return out;
            }
            ++ring;
        }
    }

private:
    int coord(double v) const { return static_cast<int>(std::floor(v / cell_)); }
    std::int64_t key(const Vec3& p) const {
        return pack(coord(p.x - lo_.x), coord(p.y - lo_.y), coord(p.z - lo_.z));
    }
    static std::int64_t pack(int x, int y, int z) {
        return (static_cast<std::int64_t>(x) & 0x1FFFFF) |
               ((static_cast<std::int64_t>(y) & 0x1FFFFF) << 21) |
               ((static_cast<std::int64_t>(z) & 0x1FFFFF) << 42);
    }

    const std::vector<Vec3>& pts_;
    double cell_;
    Vec3 lo_;
    std::map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

std::size_t component_count(
    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adj) {
    const std::size_t n = adj.size();
    std::vector<char> seen(n, 0);
    std::size_t components = 0;
    std::vector<std::uint32_t> stack;
    for (std::uint32_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        ++components;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::uint32_t v = stack.back();
            stack.pop_back();
            for (const auto& [u, w] : adj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
        }
    }
    return components;
}

} // namespace

HandSurface HandSurface::build(std::vector<Vec3> points, int k) {
    return build(std::move(points), std::vector<Region>(), k);
}

HandSurface HandSurface::build(std::vector<Vec3> points, std::vector<Region> regions,
                               int k) {
    if (points.size() < 4)
        throw GeometryError("surface needs at least 4 points");
    if (k < 1) throw GeometryError("neighbor count must be positive");
    if (!regions.empty() && regions.size() != points.size())
        throw GeometryError("region labels must match point count");

    // Median nearest-neighbor spacing sets the hash cell size.
    double span = 0.0;
    Vec3 lo = points[0], hi = points[0];
    for (const auto& p : points) {
        lo.x = std::min(lo.x, p.x); hi.x = std::max(hi.x, p.x);
        lo.y = std::min(lo.y, p.y); hi.y = std::max(hi.y, p.y);
        lo.z = std::min(lo.z, p.z); hi.z = std::max(hi.z, p.z);
    }
    span = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    if (span <= 0.0) throw GeometryError("all points coincide");
    const double cell = std::max(
        span / std::cbrt(static_cast<double>(points.size())) * 1.5, span * 1e-6);

    HandSurface s;
    s.points_ = std::move(points);
    s.regions_ = std::move(regions);
    const PointGrid grid(s.points_, cell);

    int effective = k;
    while (true) {
        s.adjacency_.assign(s.points_.size(), {});
        for (std::uint32_t i = 0; i < s.points_.size(); ++i) {
            for (std::uint32_t j : grid.knn(i, effective)) {
                const double w = (s.points_[i] - s.points_[j]).norm();
                if (w <= 0.0)
                    throw GeometryError("duplicate point at vertex " + std::to_string(i));
                s.adjacency_[i].emplace_back(j, w);
            }
        }
        // Symmetrize: a kNN edge is usable in both directions.
        for (std::uint32_t i = 0; i < s.points_.size(); ++i)
            for (const auto& [j, w] : s.adjacency_[i]) {
                auto& back = s.adjacency_[j];
                const auto it = std::find_if(back.begin(), back.end(),
                                             [&](const auto& e) { return e.first == i; });
                if (it == back.end()) back.emplace_back(i, w);
            }
        if (component_count(s.adjacency_) == 1) break;
        if (static_cast<std::size_t>(effective) >= s.points_.size() - 1)
            throw GeometryError("surface graph cannot be connected");
        effective = std::min<int>(effective * 2,
                                  static_cast<int>(s.points_.size()) - 1);
        s.k_increased_ = true;
    }
    s.effective_k_ = effective;
    return s;
}

std::vector<double> HandSurface::distance_field(std::uint32_t source) const {
    if (source >= points_.size())
        throw GeometryError("vertex index out of range: " + std::to_string(source));
    std::vector<double> dist(points_.size(), kInf);
    using Entry = std::pair<double, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    dist[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (d > dist[v]) continue;
        for (const auto& [u, w] : adjacency_[v]) {
            const double nd = d + w;
            if (nd < dist[u]) {
                dist[u] = nd;
                queue.emplace(nd, u);
            }
        }
    }
    return dist;
}

double HandSurface::geodesic(std::uint32_t a, std::uint32_t b) const {
    if (a >= points_.size() || b >= points_.size())
        throw GeometryError("vertex index out of range");
    const auto dist = distance_field(a);
    if (!std::isfinite(dist[b]))
        throw GeometryError("vertices are not connected");
    return dist[b];
}

HandSurface HandSurface::scaled(double gamma) const {
    if (!(gamma > 0.0)) throw GeometryError("scale must be positive");
    HandSurface s = *this;
    for (auto& p : s.points_) p *= gamma;
    for (auto& adj : s.adjacency_)
        for (auto& [u, w] : adj) w *= gamma;
    return s;
}

std::pair<std::uint32_t, double> HandSurface::nearest_vertex(const Vec3& p) const {
    std::uint32_t best = 0;
    double best_d2 = kInf;
    for (std::uint32_t i = 0; i < points_.size(); ++i) {
        const double d2 = (points_[i] - p).norm2();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return {best, std::sqrt(best_d2)};
}

SensorAnchors register_sensors(const HandSurface& surface, const SensorConfig& config,
                               double max_snap_mm) {
    SensorAnchors anchors;
    std::map<std::uint32_t, int> taken;
    for (const auto& sensor : config.sensors()) {
        const auto [vertex, snap] = surface.nearest_vertex(sensor.position);
        if (snap > max_snap_mm)
            throw RegistrationError("sensor " + std::to_string(sensor.id) +
                                    " snaps " + std::to_string(snap) +
                                    " mm away from the surface (limit " +
                                    std::to_string(max_snap_mm) + " mm)");
        const auto [it, fresh] = taken.emplace(vertex, sensor.id);
        if (!fresh)
            throw RegistrationError("sensors " + std::to_string(it->second) + " and " +
                                    std::to_string(sensor.id) +
                                    " snap to the same vertex");
        anchors[sensor.id] = vertex;
    }
    return anchors;
}

double max_snap_distance(const HandSurface& surface, const SensorConfig& config,
                         const SensorAnchors& anchors) {
    double worst = 0.0;
    for (const auto& [id, vertex] : anchors)
        worst = std::max(worst,
                         (surface.points()[vertex] - config.pose(id).position).norm());
    return worst;
}

SensorDistanceFields::SensorDistanceFields(const HandSurface& surface,
                                           const SensorAnchors& anchors) {
    vertex_count_ = surface.vertex_count();
    for (const auto& [id, vertex] : anchors) {
        sensor_ids_.push_back(id);
        fields_.push_back(surface.distance_field(vertex));
    }
}

void SensorDistanceFields::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write distance fields: " + path);
    const char magic[4] = {'W', 'H', 'D', '1'};
    out.write(magic, 4);
    const std::uint32_t nv = static_cast<std::uint32_t>(vertex_count_);
    const std::uint32_t ns = static_cast<std::uint32_t>(sensor_ids_.size());
    out.write(reinterpret_cast<const char*>(&nv), 4);
    out.write(reinterpret_cast<const char*>(&ns), 4);
    for (int id : sensor_ids_) {
        const std::uint16_t u = static_cast<std::uint16_t>(id);
        out.write(reinterpret_cast<const char*>(&u), 2);
    }
    for (const auto& field : fields_)
        for (double d : field) {
            const float f = static_cast<float>(d);
            out.write(reinterpret_cast<const char*>(&f), 4);
        }
}

SensorDistanceFields SensorDistanceFields::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open distance fields: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "WHD1", 4) != 0)
        throw IoError("not a distance-field file: " + path);
    std::uint32_t nv = 0, ns = 0;
    in.read(reinterpret_cast<char*>(&nv), 4);
    in.read(reinterpret_cast<char*>(&ns), 4);
    if (!in || ns > 1024 || static_cast<std::uint64_t>(nv) * ns > (1ULL << 31))
        throw IoError("distance-field header is implausible: " + path);
    SensorDistanceFields out;
    out.vertex_count_ = nv;
    for (std::uint32_t i = 0; i < ns; ++i) {
        std::uint16_t id = 0;
        in.read(reinterpret_cast<char*>(&id), 2);
        out.sensor_ids_.push_back(id);
    }
    out.fields_.assign(ns, std::vector<double>(nv, 0.0));
    for (std::uint32_t s = 0; s < ns; ++s)
        for (std::uint32_t v = 0; v < nv; ++v) {
            float f = 0.0F;
            in.read(reinterpret_cast<char*>(&f), 4);
            out.fields_[s][v] = f;
        }
    if (!in) throw IoError("truncated distance-field file: " + path);
    return out;
}

HandFixture load_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open PLY file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "ply")
        throw IoError("not a PLY file: " + path);

    std::size_t vertex_count = 0;
    std::vector<std::string> props;
    bool ascii = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = fmt == "ascii";
        } else if (tok == "element") {
            std::string what;
            std::size_t count;
            ls >> what >> count;
            if (what == "vertex") vertex_count = count;
            else if (count != 0)
                throw IoError("PLY element '" + what + "' is not supported");
        } else if (tok == "property") {
            std::string type, name;
            ls >> type >> name;
            props.push_back(name);
        } else if (tok == "end_header") {
            break;
        }
    }
    if (!ascii) throw IoError("only ascii PLY is supported: " + path);
    if (vertex_count == 0) throw IoError("PLY file has no vertices: " + path);

    int ix = -1, iy = -1, iz = -1, ir = -1;
    for (std::size_t i = 0; i < props.size(); ++i) {
        if (props[i] == "x") ix = static_cast<int>(i);
        if (props[i] == "y") iy = static_cast<int>(i);
        if (props[i] == "z") iz = static_cast<int>(i);
        if (props[i] == "region") ir = static_cast<int>(i);
    }
    if (ix < 0 || iy < 0 || iz < 0)
        throw IoError("PLY file lacks x/y/z properties: " + path);

    HandFixture fx;
    fx.points.reserve(vertex_count);
    std::vector<double> row(props.size());
    for (std::size_t v = 0; v < vertex_count; ++v) {
        if (!std::getline(in, line))
            throw IoError("PLY file truncated at vertex " + std::to_string(v));
        std::istringstream ls(line);
        for (auto& value : row)
            if (!(ls >> value))
                throw IoError("malformed PLY vertex line: " + line);
        fx.points.push_back(
            {row[static_cast<std::size_t>(ix)], row[static_cast<std::size_t>(iy)],
             row[static_cast<std::size_t>(iz)]});
        if (ir >= 0)
            fx.regions.push_back(
                static_cast<Region>(row[static_cast<std::size_t>(ir)]));
    }
    return fx;
}

void save_ply(const HandFixture& fixture, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write PLY file: " + path);
    const bool regions = !fixture.regions.empty();
    out << "ply\nformat ascii 1.0\n";
    out << "comment handwave hand surface (" << kHandLayoutVersion << ")\n";
    out << "element vertex " << fixture.points.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (regions) out << "property uchar region\n";
    out << "end_header\n";
    char buf[128];
    for (std::size_t i = 0; i < fixture.points.size(); ++i) {
        const Vec3& p = fixture.points[i];
        if (regions)
            std::snprintf(buf, sizeof(buf), "%.4f %.4f %.4f %d\n", p.x, p.y, p.z,
                          static_cast<int>(fixture.regions[i]));
        else
            std::snprintf(buf, sizeof(buf), "%.4f %.4f %.4f\n", p.x, p.y, p.z);
        out << buf;
    }
}

std::vector<Vec3> load_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open XYZ file: " + path);
    std::vector<Vec3> points;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Vec3 p;
        if (!(ls >> p.x >> p.y >> p.z))
            throw IoError("malformed XYZ line: " + line);
        points.push_back(p);
    }
    return points;
}

HandFixture load_point_cloud(const std::string& path) {
    if (path == "builtin") return make_hand_fixture();
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".ply") return load_ply(path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".xyz") {
        HandFixture fx;
        fx.points = load_xyz(path);
        return fx;
    }
    throw IoError("unsupported point cloud format (want .ply or .xyz): " + path);
}

} // namespace handwave
