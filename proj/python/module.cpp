// Python bindings for the main handwave operations: configuration, stream
// codec, throughput model, PCA projection, similarity, surface geodesics,
// wave simulation and reconstruction.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "handwave/hand_geometry.hpp"
#include "handwave/hand_model.hpp"
#include "handwave/reconstruction.hpp"
#include "handwave/signal_ops.hpp"
#include "handwave/wave_sim.hpp"
#include "handwave/wire.hpp"

namespace py = pybind11;
using namespace handwave;

namespace {

using PyVec3 = std::tuple<double, double, double>;

PyVec3 to_py(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 to_vec(const PyVec3& t) { return {std::get<0>(t), std::get<1>(t), std::get<2>(t)}; }

ContactEvent::Waveform waveform_from_name(const std::string& name) {
    if (name == "sinusoid") return ContactEvent::Waveform::Sinusoid;
    if (name == "transient") return ContactEvent::Waveform::Transient;
    throw SimulationError("unknown waveform '" + name + "'");
}

std::vector<ScalarChannel> channels_from_py(
    const std::vector<std::pair<int, std::vector<double>>>& items) {
    std::vector<ScalarChannel> out(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        out[i].id = items[i].first;
        out[i].samples = items[i].second;
    }
    return out;
}

} // namespace

PYBIND11_MODULE(handwave, m) {
    m.doc() = "Whole-hand vibration sensing toolkit: 42-sensor array "
              "simulation, acquisition-protocol codec, PCA projection, "
              "similarity scoring and geodesic wave-field reconstruction.";
    m.attr("__version__") = "1.0.0";

    py::register_exception<Error>(m, "HandwaveError", PyExc_RuntimeError);

    py::class_<SensorConfig>(m, "Config")
        .def("sensor_ids", &SensorConfig::sensor_ids)
        .def("anatomy",
             [](const SensorConfig& c, int id) {
                 return std::string(anatomy_name(c.pose(id).anatomy));
             })
        .def("position", [](const SensorConfig& c, int id) { return to_py(c.pose(id).position); })
        .def("branch",
             [](const SensorConfig& c, int id) {
                 return std::string(digit_name(c.pose(id).branch()));
             })
        .def("with_branches",
             [](const SensorConfig& c, int mask) {
                 return c.with_branches(static_cast<BranchMask>(mask));
             })
        .def("save", &save_config_file)
        .def_static("load", &load_config_file)
        .def("__len__", &SensorConfig::size);

    m.def("default_config", &default_config, py::arg("hand_scale") = 1.0,
          "Built-in 42-sensor configuration at a hand scale in [0.5, 2.0].");

    m.def(
        "hand_fixture",
        [](double hand_scale) {
            const HandFixture fx = make_hand_fixture(hand_scale);
            std::vector<PyVec3> pts;
            pts.reserve(fx.points.size());
            for (const auto& p : fx.points) pts.push_back(to_py(p));
            return py::make_tuple(pts, fx.regions);
        },
        py::arg("hand_scale") = 1.0,
        "Bundled procedural hand surface: (points, region labels).");

    py::class_<HandSurface>(m, "Surface")
        .def_property_readonly("vertex_count", &HandSurface::vertex_count)
        .def_property_readonly("effective_k", &HandSurface::effective_k)
        .def("geodesic", &HandSurface::geodesic, py::arg("a"), py::arg("b"),
             "Shortest-path distance between two vertices, mm.")
        .def("distance_field", &HandSurface::distance_field)
        .def("nearest_vertex",
             [](const HandSurface& s, const PyVec3& p) { return s.nearest_vertex(to_vec(p)); })
        .def("region", [](const HandSurface& s, std::uint32_t v) {
            return s.regions().empty() ? -1 : static_cast<int>(s.regions()[v]);
        })
        .def("scaled", &HandSurface::scaled);

    m.def(
        "build_surface",
        [](const std::vector<PyVec3>& points, int k, const std::vector<Region>& regions) {
            std::vector<Vec3> pts;
            pts.reserve(points.size());
            for (const auto& p : points) pts.push_back(to_vec(p));
            return HandSurface::build(std::move(pts), regions, k);
        },
        py::arg("points"), py::arg("k") = 8, py::arg("regions") = std::vector<Region>{},
        "k-nearest-neighbor surface graph over a point cloud.");

    m.def("register_sensors", &register_sensors, py::arg("surface"), py::arg("config"),
          py::arg("max_snap_mm") = 10.0, "Snap sensors to vertices: {id: vertex}.");

    py::class_<FrameStream>(m, "Stream")
        .def_property_readonly("rate", [](const FrameStream& s) { return s.rate; })
        .def_property_readonly("range_g",
                               [](const FrameStream& s) { return static_cast<int>(s.range); })
        .def_property_readonly("sensor_ids", [](const FrameStream& s) { return s.sensor_ids; })
        .def("__len__", [](const FrameStream& s) { return s.frames.size(); })
        .def("counter", [](const FrameStream& s, std::size_t i) { return s.frames.at(i).t; })
        .def("values",
             [](const FrameStream& s, std::size_t i) {
                 std::vector<PyVec3> out;
                 for (const auto& v : s.frames.at(i).values) out.push_back(to_py(v));
                 return out;
             },
             "Per-sensor 3-axis values of one frame.");

    m.def(
        "make_stream",
        [](const std::vector<std::vector<PyVec3>>& frames, const std::vector<int>& sensor_ids,
           double rate, int range_g) {
            FrameStream s;
            s.rate = rate;
            s.range = full_scale_from_g(range_g);
            s.sensor_ids = sensor_ids;
            for (std::size_t t = 0; t < frames.size(); ++t) {
                Sample f;
                f.t = static_cast<std::uint32_t>(t);
                f.unit = Unit::RawCounts;
                f.range = s.range;
                for (const auto& v : frames[t]) f.values.push_back(to_vec(v));
                s.frames.push_back(std::move(f));
            }
            s.validate();
            return s;
        },
        py::arg("frames"), py::arg("sensor_ids"), py::arg("rate") = 1310.0,
        py::arg("range_g") = 2, "Raw stream from per-frame count triples.");

    m.def("encode_stream",
          [](const FrameStream& s) {
              const auto bytes = encode_stream(s);
              return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
          },
          "Serialize a raw stream into the binary wire container.");

    m.def("decode_stream", [](const py::bytes& data) {
        std::string_view view = data;
        std::vector<std::uint8_t> bytes(view.begin(), view.end());
        DecodeResult r = decode_stream(bytes);
        std::vector<std::string> events;
        for (const auto& e : r.events) events.push_back(e.message);
        return py::make_tuple(std::move(r.stream), events);
    });

    m.def("sensitivity_g_per_count",
          [](int range_g) { return sensitivity_g_per_count(full_scale_from_g(range_g)); });
    m.def("count_to_ms2",
          [](double count, int range_g) { return count_to_ms2(count, full_scale_from_g(range_g)); });

    m.def(
        "schedule_throughput",
        [](double clock_hz, int branches) {
            return schedule_throughput(clock_hz,
                                       BusTopology::for_branches(static_cast<BranchMask>(branches)))
                .frames_per_second;
        },
        py::arg("clock_hz"), py::arg("branches") = int(kAllBranches),
        "Achievable frame rate of the acquisition schedule.");

    m.def(
        "pca_project",
        [](const std::vector<PyVec3>& window, bool centered) {
            std::vector<Vec3> w;
            w.reserve(window.size());
            for (const auto& p : window) w.push_back(to_vec(p));
            PcaOptions opts;
            opts.centered = centered;
            const Projection proj = pca_project(w, opts);
            py::dict out;
            out["w"] = to_py(proj.w);
            out["lambda_max"] = proj.lambda_max;
            out["samples"] = proj.samples;
            out["degenerate"] = proj.degenerate;
            out["ambiguous"] = proj.ambiguous;
            return out;
        },
        py::arg("window"), py::arg("centered") = true,
        "Leading-principal-component projection of one 3-axis window.");

    m.def(
        "project",
        [](const FrameStream& raw, int window, int hop, bool centered) {
            const FrameStream cal = calibrate_stream(raw);
            ProjectionWindowParams params;
            params.length = window;
            params.hop = hop > 0 ? hop : window / 2;
            PcaOptions opts;
            opts.centered = centered;
            const auto channels = project_stream(cal, params, opts);
            std::vector<std::pair<int, std::vector<double>>> out;
            out.reserve(channels.size());
            for (const auto& ch : channels) out.emplace_back(ch.id, ch.samples);
            return out;
        },
        py::arg("stream"), py::arg("window") = 256, py::arg("hop") = 0,
        py::arg("centered") = true,
        "Calibrate a raw stream and PCA-project it: [(sensor id, samples)].");

    m.def(
        "similarity",
        [](const std::vector<std::pair<int, std::vector<double>>>& a,
           const std::vector<std::pair<int, std::vector<double>>>& b, double rate,
           int max_lag) {
            SimilarityOptions opts;
            opts.rate = rate;
            opts.max_lag = max_lag;
            return similarity(channels_from_py(a), channels_from_py(b), opts);
        },
        py::arg("a"), py::arg("b"), py::arg("rate") = 1310.0, py::arg("max_lag") = 0,
        "Gesture similarity score S(a, b).");

    m.def(
        "rms_map",
        [](const std::vector<std::pair<int, std::vector<double>>>& channels, double window_ms,
           double rate) { return rms_map(channels_from_py(channels), window_ms, rate); },
        py::arg("channels"), py::arg("window_ms") = 250.0, py::arg("rate") = 1310.0);

    m.def("lowpass_diff", &lowpass_diff, py::arg("velocity"), py::arg("cutoff_hz"),
          py::arg("rate"), "Zero-phase low-pass then central-difference derivative.");

    m.def(
        "shear_wave_speed",
        [](double e, double rho, double mu) {
            TissueParams p;
            p.elastic_modulus_pa = e;
            p.density_kg_m3 = rho;
            p.poisson_ratio = mu;
            return p.shear_wave_speed();
        },
        py::arg("elastic_modulus_pa") = 0.13e6, py::arg("density_kg_m3") = 1020.0,
        py::arg("poisson_ratio") = 0.5);

    m.def(
        "wavelength_mm",
        [](double f, double e, double rho, double mu) {
            TissueParams p;
            p.elastic_modulus_pa = e;
            p.density_kg_m3 = rho;
            p.poisson_ratio = mu;
            return wavelength_mm(p, f);
        },
        py::arg("frequency_hz"), py::arg("elastic_modulus_pa") = 0.13e6,
        py::arg("density_kg_m3") = 1020.0, py::arg("poisson_ratio") = 0.5);

    m.def("phi", [](double d, double alpha, double c_offset, double numerator) {
              return PhiParams{numerator, alpha, c_offset}.phi(d);
          },
          py::arg("distance_mm"), py::arg("alpha") = 25.5, py::arg("c_offset") = 8.7e-2,
          py::arg("numerator") = 17.0, "Distance-weighting law phi(d).");

    py::class_<WaveField>(m, "Field")
        .def_property_readonly("vertex_count", [](const WaveField& f) { return f.vertex_count; })
        .def_property_readonly("frame_count", [](const WaveField& f) { return f.frame_count; })
        .def_property_readonly("rate", [](const WaveField& f) { return f.rate; })
        .def("at", [](const WaveField& f, std::uint32_t v, std::size_t t) { return f.at(v, t); })
        .def("rms_map", [](const WaveField& f, double window_ms) {
                 return rms_surface_map(f, window_ms);
             },
             py::arg("window_ms") = 250.0);

    m.def(
        "propagate",
        [](const HandSurface& surface, std::uint32_t source_vertex, const std::string& waveform,
           double frequency_hz, double amplitude_ms2, double onset_s, double duration_s,
           double decay_tau_s, double sim_seconds, double rate) {
            ContactEvent ev;
            ev.source_vertex = source_vertex;
            ev.waveform = waveform_from_name(waveform);
            ev.frequency_hz = frequency_hz;
            ev.amplitude_ms2 = amplitude_ms2;
            ev.onset_s = onset_s;
            ev.duration_s = duration_s;
            ev.decay_tau_s = decay_tau_s;
            return propagate(surface, ev, TissueParams{}, sim_seconds, rate);
        },
        py::arg("surface"), py::arg("source_vertex"), py::arg("waveform") = "sinusoid",
        py::arg("frequency_hz") = 100.0, py::arg("amplitude_ms2") = 5.0,
        py::arg("onset_s") = 0.1, py::arg("duration_s") = 1.0, py::arg("decay_tau_s") = 0.02,
        py::arg("sim_seconds") = 1.5, py::arg("rate") = 1310.0,
        "Damped traveling wave from a point contact; returns the ground-truth field.");

    m.def(
        "sample_sensors",
        [](const WaveField& field, const SensorConfig& config, const SensorAnchors& anchors,
           int range_g, double noise_g, std::uint64_t seed, bool with_gravity) {
            SamplingOptions opts;
            opts.range = full_scale_from_g(range_g);
            opts.noise_g = noise_g;
            opts.seed = seed;
            opts.with_gravity = with_gravity;
            return sample_sensors(field, config, anchors, opts);
        },
        py::arg("field"), py::arg("config"), py::arg("anchors"), py::arg("range_g") = 4,
        py::arg("noise_g") = 0.5e-3, py::arg("seed") = 0, py::arg("with_gravity") = true,
        "Sample the field through the virtual sensor array into raw counts.");

    m.def(
        "reconstruct",
        [](const std::vector<std::pair<int, std::vector<double>>>& channels,
           const HandSurface& surface, const SensorAnchors& anchors, double rate, double alpha,
           double c_offset, double numerator, bool rectify) {
            const SensorDistanceFields dists(surface, anchors);
            const WeightField weights(dists, PhiParams{numerator, alpha, c_offset}, rectify);
            return reconstruct(channels_from_py(channels), weights, rate);
        },
        py::arg("channels"), py::arg("surface"), py::arg("anchors"), py::arg("rate") = 1310.0,
        py::arg("alpha") = 25.5, py::arg("c_offset") = 8.7e-2, py::arg("numerator") = 17.0,
        py::arg("rectify") = true,
        "Physiologically weighted geodesic interpolation onto every vertex.");
}
