#include "handwave/exports.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace handwave {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& path) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw IoError(path + ": not a number: " + s);
    }
}

} // namespace

void save_channels_csv(const std::vector<ScalarChannel>& channels, double rate,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV: " + path);
    out << "# rate_hz " << rate << "\n";
    out << "t";
    for (const auto& ch : channels) out << "," << ch.id;
    out << "\n";
    const std::size_t frames = channels.empty() ? 0 : channels[0].samples.size();
    char buf[64];
    for (std::size_t t = 0; t < frames; ++t) {
        std::snprintf(buf, sizeof(buf), "%.9f", static_cast<double>(t) / rate);
        out << buf;
        for (const auto& ch : channels) {
            std::snprintf(buf, sizeof(buf), ",%.10g", ch.samples[t]);
            out << buf;
        }
        out << "\n";
    }
}

ChannelsCsv load_channels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV: " + path);
    ChannelsCsv result;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "rate_hz") ls >> result.rate;
            continue;
        }
        const auto fields = split_csv(line);
        if (!have_header) {
            if (fields.empty() || fields[0] != "t")
                throw IoError(path + ": expected channel CSV header starting with 't'");
            for (std::size_t i = 1; i < fields.size(); ++i) {
                ScalarChannel ch;
                ch.id = static_cast<int>(parse_double(fields[i], path));
                result.channels.push_back(ch);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != result.channels.size() + 1)
            throw IoError(path + ": row width does not match header");
        for (std::size_t i = 1; i < fields.size(); ++i)
            result.channels[i - 1].samples.push_back(parse_double(fields[i], path));
    }
    if (!have_header) throw IoError(path + ": empty channel CSV");
    return result;
}

void save_counts_csv(const FrameStream& stream, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV: " + path);
    out << "# rate_hz " << stream.rate << "\n";
    out << "# range_g " << static_cast<int>(stream.range) << "\n";
    out << "frame";
    for (int id : stream.sensor_ids)
        out << "," << id << "_x," << id << "_y," << id << "_z";
    out << "\n";
    for (const auto& f : stream.frames) {
        out << f.t;
        for (const auto& v : f.values)
            out << "," << static_cast<long long>(v.x) << ","
                << static_cast<long long>(v.y) << "," << static_cast<long long>(v.z);
        out << "\n";
    }
}

FrameStream load_counts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV: " + path);
    FrameStream stream;
    int range_g = 2;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "rate_hz") ls >> stream.rate;
            if (key == "range_g") ls >> range_g;
            continue;
        }
        const auto fields = split_csv(line);
        if (!have_header) {
            if (fields.empty() || fields[0] != "frame")
                throw IoError(path + ": expected counts CSV header starting with 'frame'");
            if ((fields.size() - 1) % 3 != 0)
                throw IoError(path + ": counts CSV needs three columns per sensor");
            for (std::size_t i = 1; i < fields.size(); i += 3) {
                const std::string& name = fields[i];
                const std::size_t us = name.find('_');
                if (us == std::string::npos)
                    throw IoError(path + ": malformed column name " + name);
                stream.sensor_ids.push_back(
                    static_cast<int>(parse_double(name.substr(0, us), path)));
            }
            have_header = true;
            continue;
        }
        if (fields.size() != stream.sensor_ids.size() * 3 + 1)
            throw IoError(path + ": row width does not match header");
        Sample f;
        f.t = static_cast<std::uint32_t>(parse_double(fields[0], path));
        f.unit = Unit::RawCounts;
        for (std::size_t s = 0; s < stream.sensor_ids.size(); ++s) {
            Vec3 v;
            for (int a = 0; a < 3; ++a) v[a] = parse_double(fields[1 + 3 * s + a], path);
            f.values.push_back(v);
        }
        stream.frames.push_back(std::move(f));
    }
    if (!have_header) throw IoError(path + ": empty counts CSV");
    stream.range = full_scale_from_g(range_g);
    for (auto& f : stream.frames) f.range = stream.range;
    return stream;
}

void save_similarity_csv(const SimilarityMatrix& matrix, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV: " + path);
    for (const auto& name : matrix.names) out << "," << name;
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < matrix.names.size(); ++i) {
        out << matrix.names[i];
        for (std::size_t j = 0; j < matrix.names.size(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.10g", matrix.scores[i][j]);
            out << buf;
        }
        out << "\n";
    }
}

void save_vertex_map_csv(const std::vector<Vec3>& points,
                         const std::vector<double>& values, const std::string& path) {
    if (points.size() != values.size())
        throw IoError("vertex map: points and values differ in length");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV: " + path);
    out << "vertex,x,y,z,value\n";
    char buf[160];
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.4f,%.4f,%.4f,%.10g\n", i, points[i].x,
                      points[i].y, points[i].z, values[i]);
        out << buf;
    }
}

void save_vertex_map_pgm(const std::vector<Vec3>& points,
                         const std::vector<double>& values, const std::string& path,
                         double pixel_mm) {
    if (points.size() != values.size() || points.empty())
        throw IoError("vertex map: points and values differ in length");
    if (!(pixel_mm > 0.0)) throw IoError("pixel size must be positive");
    double min_x = points[0].x, max_x = points[0].x;
    double min_y = points[0].y, max_y = points[0].y;
    double max_v = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        min_x = std::min(min_x, points[i].x);
        max_x = std::max(max_x, points[i].x);
        min_y = std::min(min_y, points[i].y);
        max_y = std::max(max_y, points[i].y);
        max_v = std::max(max_v, std::abs(values[i]));
    }
    const int w = static_cast<int>(std::ceil((max_x - min_x) / pixel_mm)) + 1;
    const int h = static_cast<int>(std::ceil((max_y - min_y) / pixel_mm)) + 1;
    std::vector<int> image(static_cast<std::size_t>(w) * h, 0);
    const double scale = max_v > 0.0 ? 255.0 / max_v : 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int px = static_cast<int>(std::round((points[i].x - min_x) / pixel_mm));
        const int py = static_cast<int>(std::round((points[i].y - min_y) / pixel_mm));
        // y up in hand frame, row 0 at the top of the image
        const std::size_t idx =
            static_cast<std::size_t>(h - 1 - py) * static_cast<std::size_t>(w) +
            static_cast<std::size_t>(px);
        image[idx] = std::max(image[idx],
                              static_cast<int>(std::round(std::abs(values[i]) * scale)));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write PGM: " + path);
    out << "P5\n" << w << " " << h << "\n255\n";
    for (int v : image) out.put(static_cast<char>(v));
}

} // namespace handwave
