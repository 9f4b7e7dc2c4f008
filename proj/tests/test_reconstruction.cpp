#include <doctest.h>

#include <fstream>
#include <cstdio>
#include <random>

#include "handwave/reconstruction.hpp"

using namespace handwave;

namespace {

// Straight line of vertices, 10 mm apart, with sensors anchored at both ends.
struct LineRig {
    HandSurface surface;
    SensorAnchors anchors;
    SensorDistanceFields fields;

    explicit LineRig(int n = 20)
        : surface(HandSurface::build(line_points(n), 2)),
          anchors{{1, 0}, {2, static_cast<std::uint32_t>(n - 1)}},
          fields(surface, anchors) {}

    static std::vector<Vec3> line_points(int n) {
        std::vector<Vec3> pts;
        for (int i = 0; i < n; ++i) pts.push_back({10.0 * i, 0.0, 0.0});
        return pts;
    }
};

ScalarChannel make_channel(int id, std::vector<double> samples) {
    ScalarChannel ch;
    ch.id = id;
    ch.samples = std::move(samples);
    return ch;
}

} // namespace

TEST_SUITE("reconstruction") {

TEST_CASE("weighting law constants") {
    const PhiParams phi;
    CHECK(phi.phi(0.0) == doctest::Approx(17.0 / 25.5 - 0.087).epsilon(1e-12));
    CHECK(phi.phi(0.0) == doctest::Approx(0.5796667).epsilon(1e-6));

    // crosses zero near 169.9 mm; rectified weight vanishes beyond
    const double zc = phi.zero_crossing_mm();
    CHECK(zc == doctest::Approx(169.902299).epsilon(1e-6));
    CHECK(phi.phi(zc - 0.01) > 0.0);
    CHECK(phi.phi(zc + 0.01) < 0.0);
    CHECK(rectified(phi.phi(250.0)) == 0.0);
    CHECK(rectified(phi.phi(zc + 1e-6)) == 0.0);

    // with rectification off, negative values pass through
    CHECK(phi.phi(250.0) < 0.0);
}

TEST_CASE("alpha must be positive") {
    const LineRig rig;
    CHECK_THROWS_AS(WeightField(rig.fields, PhiParams{17.0, 0.0, 0.087}),
                    ReconstructionError);
    CHECK_THROWS_AS(WeightField(rig.fields, PhiParams{17.0, -1.0, 0.087}),
                    ReconstructionError);
}

TEST_CASE("a sensor's weight peaks at its own anchor and never grows with distance") {
    const LineRig rig;
    const WeightField w(rig.fields, PhiParams{});
    for (std::size_t s = 0; s < 2; ++s) {
        const std::uint32_t anchor = rig.anchors.at(w.sensor_ids()[s]);
        double peak = 0.0;
        for (std::uint32_t v = 0; v < rig.surface.vertex_count(); ++v)
            peak = std::max(peak, w.weight(s, v));
        CHECK(w.weight(s, anchor) == peak);
    }
    // monotone along the line away from sensor 1's anchor at vertex 0
    for (std::uint32_t v = 0; v + 1 < rig.surface.vertex_count(); ++v)
        CHECK(w.weight(0, v + 1) <= w.weight(0, v));
}

TEST_CASE("unrectified weights keep their sign") {
    const LineRig rig(30); // far end is 290 mm out, beyond the zero crossing
    const WeightField rect(rig.fields, PhiParams{}, true);
    const WeightField raw(rig.fields, PhiParams{}, false);
    CHECK(rect.weight(0, 29) == 0.0);
    CHECK(raw.weight(0, 29) < 0.0);
}

TEST_CASE("single active sensor reconstructs as its normalized weight times the channel") {
    const LineRig rig;
    const WeightField w(rig.fields, PhiParams{});
    std::vector<double> signal(64);
    for (std::size_t t = 0; t < signal.size(); ++t)
        signal[t] = std::sin(0.3 * static_cast<double>(t));
    const std::vector<ScalarChannel> channels{make_channel(1, signal),
                                              make_channel(2, std::vector<double>(64, 0.0))};
    const WaveField field = reconstruct(channels, w, 1310.0);
    for (std::uint32_t v = 0; v < rig.surface.vertex_count(); ++v) {
        const double wn = w.weight(0, v) / w.total_weight(v);
        for (std::size_t t = 0; t < signal.size(); ++t)
            CHECK(field.at(v, t) == doctest::Approx(wn * signal[t]).epsilon(1e-12));
    }
}

TEST_CASE("identical channels reconstruct to the common signal everywhere") {
    const LineRig rig;
    const WeightField w(rig.fields, PhiParams{});
    std::vector<double> signal(100);
    for (std::size_t t = 0; t < signal.size(); ++t)
        signal[t] = std::cos(0.1 * static_cast<double>(t)) * 3.0;
    const std::vector<ScalarChannel> channels{make_channel(1, signal), make_channel(2, signal)};
    const WaveField field = reconstruct(channels, w, 1310.0);
    for (std::uint32_t v = 0; v < rig.surface.vertex_count(); ++v)
        for (std::size_t t = 0; t < signal.size(); ++t)
            CHECK(field.at(v, t) == doctest::Approx(signal[t]).epsilon(1e-12));
}

TEST_CASE("normalized weights sum to one and the field obeys the convexity bound") {
    const LineRig rig;
    const WeightField w(rig.fields, PhiParams{});
    for (std::uint32_t v = 0; v < rig.surface.vertex_count(); ++v) {
        double total = 0.0;
        for (std::size_t s = 0; s < 2; ++s) total += w.weight(s, v) / w.total_weight(v);
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 2.0);
    std::vector<double> a(48), b(48);
    for (std::size_t t = 0; t < a.size(); ++t) {
        a[t] = g(rng);
        b[t] = g(rng);
    }
    const WaveField field =
        reconstruct({make_channel(1, a), make_channel(2, b)}, w, 1310.0);
    for (std::uint32_t v = 0; v < field.vertex_count; ++v)
        for (std::size_t t = 0; t < field.frame_count; ++t) {
            const double bound = std::max(std::abs(a[t]), std::abs(b[t]));
            CHECK(std::abs(field.at(v, t)) <= bound * (1.0 + 1e-12) + 1e-15);
        }
}

TEST_CASE("orphan vertices are reported by index") {
    const LineRig rig(30); // beyond 169.9 mm both sensors... only sensor 2 covers the far end
    // remove sensor 2 so far vertices lose all coverage
    SensorAnchors only_first{{1, 0}};
    const SensorDistanceFields fields(rig.surface, only_first);
    const WeightField w(fields, PhiParams{});
    CHECK_FALSE(w.orphan_vertices().empty());
    CHECK_THROWS_WITH_AS(
        reconstruct({make_channel(1, std::vector<double>(8, 1.0))}, w, 1310.0),
        doctest::Contains("zero total weight"), ReconstructionError);
}

TEST_CASE("gamma-scaled surface with gamma-scaled law reproduces the weights exactly") {
    const LineRig rig;
    const WeightField base(rig.fields, PhiParams{});

    const HandSurface scaled = rig.surface.scaled(2.0);
    const SensorDistanceFields scaled_fields(scaled, rig.anchors);
    const WeightField doubled(scaled_fields, PhiParams{}.scaled(2.0));

    for (std::uint32_t v = 0; v < rig.surface.vertex_count(); ++v)
        for (std::size_t s = 0; s < 2; ++s)
            CHECK(doubled.weight(s, v) == base.weight(s, v));
}

TEST_CASE("surface RMS map") {
    WaveField field;
    field.vertex_count = 3;
    field.frame_count = 655;
    field.rate = 1310.0;
    field.values.assign(3 * 655, 0.0);
    for (std::size_t t = 0; t < 655; ++t) {
        field.at(0, t) = -2.0;
        field.at(1, t) = std::sin(2.0 * kPi * 100.0 * static_cast<double>(t) / 1310.0);
    }
    const auto map = rms_surface_map(field, 250.0);
    CHECK(map[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(map[2] == 0.0);

    // window covering the whole duration equals the global RMS
    const auto full = rms_surface_map(field, 655.0 / 1310.0 * 1000.0);
    double acc = 0.0;
    for (std::size_t t = 0; t < 655; ++t) acc += field.at(1, t) * field.at(1, t);
    CHECK(full[1] == doctest::Approx(std::sqrt(acc / 655.0)).epsilon(1e-9));

    CHECK_THROWS_AS(rms_surface_map(field, 600.0), ProcessingError);
}

TEST_CASE("vector reconstruction applies the scalar path per axis") {
    const LineRig rig;
    const WeightField w(rig.fields, PhiParams{});
    std::vector<std::vector<Vec3>> vec_channels(2, std::vector<Vec3>(16));
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& ch : vec_channels)
        for (auto& v : ch) v = {g(rng), g(rng), g(rng)};
    const auto fields = reconstruct_vector({1, 2}, vec_channels, w, 1310.0);

    for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> a(16), b(16);
        for (std::size_t t = 0; t < 16; ++t) {
            a[t] = vec_channels[0][t][axis];
            b[t] = vec_channels[1][t][axis];
        }
        const WaveField expect =
            reconstruct({make_channel(1, a), make_channel(2, b)}, w, 1310.0);
        for (std::uint32_t v = 0; v < expect.vertex_count; ++v)
            for (std::size_t t = 0; t < 16; ++t)
                CHECK(fields[static_cast<std::size_t>(axis)].at(v, t) == expect.at(v, t));
    }
}

TEST_CASE("per-frame CSV snapshot") {
    WaveField field;
    field.vertex_count = 3;
    field.frame_count = 2;
    field.rate = 1310.0;
    field.values = {0.5, 1.5, -2.0, 0.0, 3.25, 4.0};
    const std::string path = "/tmp/handwave_test_snapshot.csv";
    save_wave_field_frame_csv(field, 1, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "vertex,value");
    std::getline(in, line);
    CHECK(line == "0,1.5");
    std::getline(in, line);
    CHECK(line == "1,0");
    std::remove(path.c_str());
    CHECK_THROWS_AS(save_wave_field_frame_csv(field, 2, path), IoError);
}

TEST_CASE("wave field binary round trip") {
    WaveField field;
    field.vertex_count = 5;
    field.frame_count = 7;
    field.rate = 1310.0;
    field.values.resize(35);
    for (std::size_t i = 0; i < field.values.size(); ++i)
        field.values[i] = std::sin(static_cast<double>(i));
    const std::string path = "/tmp/handwave_test_field.whf";
    save_wave_field(field, path);
    const WaveField back = load_wave_field(path);
    CHECK(back.vertex_count == field.vertex_count);
    CHECK(back.frame_count == field.frame_count);
    CHECK(back.rate == field.rate);
    for (std::size_t i = 0; i < field.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(field.values[i]).epsilon(1e-6));
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_wave_field("/nonexistent.whf"), IoError);
}

} // TEST_SUITE
