// handwave command-line front end: simulation, stream codec, projection,
// similarity, reconstruction and RMS maps, emitting plot-ready CSV/PGM plus
// a manifest per run.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "handwave/exports.hpp"
#include "handwave/hand_geometry.hpp"
#include "handwave/hand_model.hpp"
#include "handwave/hash.hpp"
#include "handwave/reconstruction.hpp"
#include "handwave/signal_ops.hpp"
#include "handwave/wave_sim.hpp"
#include "handwave/wire.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace handwave;

namespace {

// Exit codes, sysexits-flavored; documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;      // bad flags / bad invocation
constexpr int kExitDataError = 65;  // malformed or corrupt input data
constexpr int kExitNoInput = 66;    // missing input file
constexpr int kExitStage = 69;      // stage dependency or parameter unmet
constexpr int kExitInternal = 70;

std::string version_string() { return "handwave 1.0.0"; }

void require_input(const std::string& path) {
    if (path == "builtin") return;
    if (!fs::exists(path)) {
        std::cerr << "error: input file not found: " << path << "\n";
        std::exit(kExitNoInput);
    }
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

/// All writes of a run land inside one declared output directory, and every
/// produced file is hashed into the run manifest.
class RunDir {
public:
    RunDir(std::string command, std::string dir)
        : command_(std::move(command)), dir_(std::move(dir)) {
        fs::create_directories(dir_);
        manifest_["schema"] = 1;
        manifest_["tool"] = version_string();
        manifest_["command"] = command_;
        manifest_["params"] = json::object();
        manifest_["inputs"] = json::array();
        manifest_["outputs"] = json::array();
    }

    std::string path(const std::string& name) const {
        return (fs::path(dir_) / name).string();
    }

    void param(const std::string& key, const json& value) {
        manifest_["params"][key] = value;
    }

    void note_input(const std::string& path) {
        if (path == "builtin") {
            manifest_["inputs"].push_back({{"path", "builtin"}});
            return;
        }
        const auto bytes = read_bytes(path);
        manifest_["inputs"].push_back(
            {{"path", path}, {"bytes", bytes.size()}, {"fnv64", hash_hex(bytes)}});
    }

    void note_output(const std::string& path) {
        const auto bytes = read_bytes(path);
        manifest_["outputs"].push_back(
            {{"path", path}, {"bytes", bytes.size()}, {"fnv64", hash_hex(bytes)}});
    }

    void finish() {
        std::ofstream out(path("manifest.json"));
        out << manifest_.dump(2) << "\n";
        std::cout << "wrote " << path("manifest.json") << "\n";
    }

private:
    static std::string hash_hex(const std::vector<std::uint8_t>& bytes) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
        return buf;
    }

    std::string command_;
    std::string dir_;
    json manifest_;
};

struct MeshBundle {
    HandSurface surface;
    SensorConfig config;
    SensorAnchors anchors;
};

MeshBundle load_mesh_bundle(const std::string& mesh, double hand_scale) {
    HandFixture fx = load_point_cloud(mesh);
    if (mesh == "builtin" && hand_scale != 1.0) fx = make_hand_fixture(hand_scale);
    MeshBundle b{HandSurface::build(std::move(fx.points), std::move(fx.regions)),
                 default_config(hand_scale),
                 {}};
    if (b.surface.k_was_increased())
        std::cerr << "warning: neighbor count raised to " << b.surface.effective_k()
                  << " to connect the surface graph\n";
    b.anchors = register_sensors(b.surface, b.config);
    return b;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& scenario_path, const std::string& mesh,
                 const std::string& out_dir) {
    const Scenario sc = load_scenario(scenario_path);
    RunDir run("simulate", out_dir);
    run.note_input(scenario_path);
    run.note_input(mesh);

    MeshBundle b = load_mesh_bundle(mesh, sc.hand_scale);

    ContactEvent event;
    if (sc.source_vertex) {
        if (*sc.source_vertex >= b.surface.vertex_count())
            throw SimulationError("source_vertex out of range");
        event.source_vertex = *sc.source_vertex;
    } else {
        event.source_vertex = b.anchors.at(*sc.source_sensor);
    }
    event.waveform = sc.waveform;
    event.frequency_hz = sc.frequency_hz;
    event.amplitude_ms2 = sc.amplitude_ms2;
    event.onset_s = sc.onset_s;
    event.duration_s = sc.duration_s;
    event.decay_tau_s = sc.decay_tau_s;

    TissueParams tissue;
    const WaveField truth = propagate(b.surface, event, tissue, sc.sim_seconds, sc.rate_hz);

    SamplingOptions sopts;
    sopts.range = full_scale_from_g(sc.range_g);
    sopts.noise_g = sc.noise_g;
    sopts.seed = sc.seed;
    const FrameStream raw = sample_sensors(truth, b.config, b.anchors, sopts);

    write_bytes(run.path("stream.whv"), encode_stream(raw));
    save_wave_field(truth, run.path("ground_truth.whf"));
    save_config_file(b.config, run.path("config.cfg"));

    run.param("source_vertex", event.source_vertex);
    run.param("frequency_hz", sc.frequency_hz);
    run.param("rate_hz", sc.rate_hz);
    run.param("seed", sc.seed);
    run.param("range_g", sc.range_g);
    run.param("noise_g", sc.noise_g);
    run.param("hand_scale", sc.hand_scale);
    run.note_output(run.path("stream.whv"));
    run.note_output(run.path("ground_truth.whf"));
    run.note_output(run.path("config.cfg"));
    run.finish();
    std::cout << "simulated " << raw.frames.size() << " frames at " << raw.rate
              << " Hz (source vertex " << event.source_vertex << ")\n";
    return kExitOk;
}

int cmd_encode(const std::string& counts_csv, const std::string& out_dir) {
    RunDir run("encode", out_dir);
    run.note_input(counts_csv);
    const FrameStream stream = load_counts_csv(counts_csv);
    write_bytes(run.path("stream.whv"), encode_stream(stream));
    run.note_output(run.path("stream.whv"));
    run.finish();
    std::cout << "encoded " << stream.frames.size() << " frames\n";
    return kExitOk;
}

int cmd_decode(const std::string& stream_path, const std::string& out_dir) {
    RunDir run("decode", out_dir);
    run.note_input(stream_path);
    const DecodeResult result = decode_stream(read_bytes(stream_path));
    save_counts_csv(result.stream, run.path("counts.csv"));
    {
        std::ofstream ev(run.path("events.txt"));
        for (const auto& e : result.events) ev << e.message << "\n";
    }
    run.param("rate_hz", result.header.rate);
    run.param("range_g", static_cast<int>(result.header.range));
    run.param("frames", result.stream.frames.size());
    run.param("events", result.events.size());
    run.note_output(run.path("counts.csv"));
    run.note_output(run.path("events.txt"));
    run.finish();
    std::cout << "decoded " << result.stream.frames.size() << " frames, "
              << result.events.size() << " event(s)\n";
    for (const auto& e : result.events) std::cout << "  event: " << e.message << "\n";
    return kExitOk;
}

int cmd_project(const std::string& stream_path, const std::string& out_dir, int window,
                int hop, bool uncentered) {
    RunDir run("project", out_dir);
    run.note_input(stream_path);
    const DecodeResult decoded = decode_stream(read_bytes(stream_path));
    const FrameStream cal = calibrate_stream(decoded.stream);
    ProjectionWindowParams params;
    params.length = window;
    params.hop = hop > 0 ? hop : window / 2;
    PcaOptions opts;
    opts.centered = !uncentered;
    const auto channels = project_stream(cal, params, opts);
    save_channels_csv(channels, cal.rate, run.path("channels.csv"));
    run.param("window", params.length);
    run.param("hop", params.hop);
    run.param("centered", opts.centered);
    run.note_output(run.path("channels.csv"));
    run.finish();
    std::cout << "projected " << channels.size() << " channels x "
              << (channels.empty() ? 0 : channels[0].samples.size()) << " samples\n";
    return kExitOk;
}

int cmd_similarity(const std::vector<std::string>& channel_files,
                   const std::string& out_dir, int max_lag) {
    RunDir run("similarity", out_dir);
    std::vector<std::vector<ScalarChannel>> gestures;
    std::vector<std::string> names;
    double rate = 1310.0;
    for (const auto& f : channel_files) {
        run.note_input(f);
        ChannelsCsv csv = load_channels_csv(f);
        rate = csv.rate;
        gestures.push_back(std::move(csv.channels));
        names.push_back(fs::path(f).stem().string());
    }
    SimilarityOptions opts;
    opts.rate = rate;
    opts.max_lag = max_lag;
    const SimilarityMatrix matrix = similarity_matrix(gestures, names, opts);
    save_similarity_csv(matrix, run.path("similarity.csv"));
    run.param("max_lag", max_lag);
    run.note_output(run.path("similarity.csv"));
    run.finish();
    for (std::size_t i = 0; i < matrix.names.size(); ++i) {
        std::cout << matrix.names[i] << ":";
        for (double s : matrix.scores[i]) std::cout << " " << s;
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_reconstruct(const std::string& channels_csv, const std::string& mesh,
                    const std::string& out_dir, double alpha, double c_offset,
                    double numerator, bool no_rectify, double hand_scale,
                    int snapshot_frame, bool save_distances) {
    RunDir run("reconstruct", out_dir);
    run.note_input(channels_csv);
    run.note_input(mesh);
    const ChannelsCsv csv = load_channels_csv(channels_csv);
    MeshBundle b = load_mesh_bundle(mesh, hand_scale);
    const SensorDistanceFields dists(b.surface, b.anchors);
    const PhiParams phi{numerator, alpha, c_offset};
    const WeightField weights(dists, phi, !no_rectify);
    const WaveField field = reconstruct(csv.channels, weights, csv.rate);
    save_wave_field(field, run.path("wavefield.whf"));
    if (save_distances) {
        dists.save(run.path("distances.whd"));
        run.note_output(run.path("distances.whd"));
    }
    if (snapshot_frame >= 0) {
        save_wave_field_frame_csv(field, static_cast<std::size_t>(snapshot_frame),
                                  run.path("snapshot.csv"));
        run.param("snapshot_frame", snapshot_frame);
        run.note_output(run.path("snapshot.csv"));
    }
    run.param("alpha_mm", alpha);
    run.param("c_offset", c_offset);
    run.param("numerator", numerator);
    run.param("rectify", !no_rectify);
    run.param("hand_scale", hand_scale);
    run.note_output(run.path("wavefield.whf"));
    run.finish();
    std::cout << "reconstructed " << field.vertex_count << " vertices x "
              << field.frame_count << " frames\n";
    return kExitOk;
}

int cmd_rms_map(const std::string& wavefield_path, const std::string& mesh,
                const std::string& out_dir, double window_ms, bool pgm,
                double hand_scale) {
    RunDir run("rms-map", out_dir);
    run.note_input(wavefield_path);
    run.note_input(mesh);
    const WaveField field = load_wave_field(wavefield_path);
    HandFixture fx = load_point_cloud(mesh);
    if (mesh == "builtin" && hand_scale != 1.0) fx = make_hand_fixture(hand_scale);
    if (fx.points.size() != field.vertex_count)
        throw ReconstructionError("wave field has " + std::to_string(field.vertex_count) +
                                  " vertices but the mesh has " +
                                  std::to_string(fx.points.size()));
    const auto rms = rms_surface_map(field, window_ms);
    save_vertex_map_csv(fx.points, rms, run.path("rms_map.csv"));
    if (pgm) save_vertex_map_pgm(fx.points, rms, run.path("rms_map.pgm"));
    run.param("window_ms", window_ms);
    run.note_output(run.path("rms_map.csv"));
    if (pgm) run.note_output(run.path("rms_map.pgm"));
    run.finish();

    const std::size_t argmax = static_cast<std::size_t>(
        std::max_element(rms.begin(), rms.end()) - rms.begin());
    std::cout << "rms map over " << rms.size() << " vertices; argmax vertex " << argmax;
    if (!fx.regions.empty()) {
        const Region r = fx.regions[argmax];
        std::cout << " (region "
                  << (r == kRegionPalm
                          ? std::string("palm")
                          : std::string("digit ") + digit_name(static_cast<Digit>(r)))
                  << ")";
    }
    std::cout << "\n";
    return kExitOk;
}

int cmd_throughput(double clock_hz, int branch_mask) {
    const BusTopology topology =
        BusTopology::for_branches(static_cast<BranchMask>(branch_mask));
    const ThroughputEstimate est = schedule_throughput(clock_hz, topology);
    std::printf("clock %.0f Hz, %zu buses -> %.1f frames/s\n", clock_hz,
                est.bus_cycles.size(), est.frames_per_second);
    std::printf("limiting bus %zu (%.0f cycles/frame)\n", est.limiting_bus,
                est.bus_cycles[est.limiting_bus]);
    return kExitOk;
}

int cmd_fixture(const std::string& out_dir, double hand_scale) {
    RunDir run("fixture", out_dir);
    const HandFixture fx = make_hand_fixture(hand_scale);
    save_ply(fx, run.path("hand_fixture.ply"));
    save_config_file(default_config(hand_scale), run.path("default_config.cfg"));
    run.param("hand_scale", hand_scale);
    run.note_output(run.path("hand_fixture.ply"));
    run.note_output(run.path("default_config.cfg"));
    run.finish();
    std::cout << "wrote fixture with " << fx.points.size() << " vertices\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"handwave: whole-hand vibration sensing toolkit"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    std::string scenario_path, mesh = "builtin", out_dir;
    std::string counts_csv, stream_path, channels_csv, wavefield_path;
    std::vector<std::string> channel_files;
    int window = 256, hop = 0, max_lag = 0, branch_mask = kAllBranches;
    int snapshot_frame = -1;
    bool uncentered = false, no_rectify = false, pgm = false, save_distances = false;
    double alpha = 25.5, c_offset = 8.7e-2, numerator = 17.0, hand_scale = 1.0;
    double window_ms = 250.0, clock_hz = 1.6e6;

    auto* simulate = app.add_subcommand("simulate", "simulate a contact and sample the array");
    simulate->add_option("--scenario", scenario_path, "scenario file")->required();
    simulate->add_option("--mesh", mesh, "point cloud (.ply/.xyz) or 'builtin'");
    simulate->add_option("--out", out_dir, "output directory")->required();

    auto* encode = app.add_subcommand("encode", "encode a counts CSV into a stream");
    encode->add_option("--counts", counts_csv, "counts CSV")->required();
    encode->add_option("--out", out_dir, "output directory")->required();

    auto* decode = app.add_subcommand("decode", "decode a stream into a counts CSV");
    decode->add_option("--stream", stream_path, "stream file")->required();
    decode->add_option("--out", out_dir, "output directory")->required();

    auto* project = app.add_subcommand("project", "PCA-project a stream into scalar channels");
    project->add_option("--stream", stream_path, "stream file")->required();
    project->add_option("--window", window, "window length N (100 < N < 1000)");
    project->add_option("--hop", hop, "hop between windows (default N/2)");
    project->add_flag("--uncentered", uncentered, "use the raw second-moment matrix");
    project->add_option("--out", out_dir, "output directory")->required();

    auto* similarity = app.add_subcommand("similarity", "pairwise gesture similarity matrix");
    similarity->add_option("--channels", channel_files, "channel CSV files")
        ->required()
        ->expected(-1);
    similarity->add_option("--max-lag", max_lag, "lag bound in samples (0 = auto)");
    similarity->add_option("--out", out_dir, "output directory")->required();

    auto* reconstruct = app.add_subcommand("reconstruct", "interpolate channels onto the surface");
    reconstruct->add_option("--channels", channels_csv, "channel CSV")->required();
    reconstruct->add_option("--mesh", mesh, "point cloud (.ply/.xyz) or 'builtin'");
    reconstruct->add_option("--alpha", alpha, "distance offset, mm");
    reconstruct->add_option("--c-offset", c_offset, "weighting offset");
    reconstruct->add_option("--numerator", numerator, "weighting numerator, mm");
    reconstruct->add_flag("--no-rectify", no_rectify, "keep negative weights (preserve phase)");
    reconstruct->add_option("--hand-scale", hand_scale, "hand scale factor");
    reconstruct->add_option("--snapshot", snapshot_frame, "also write one frame as CSV");
    reconstruct->add_flag("--save-distances", save_distances,
                          "also write the per-sensor geodesic distance fields");
    reconstruct->add_option("--out", out_dir, "output directory")->required();

    auto* rms = app.add_subcommand("rms-map", "per-vertex RMS map of a wave field");
    rms->add_option("--wavefield", wavefield_path, "wave field file")->required();
    rms->add_option("--mesh", mesh, "point cloud (.ply/.xyz) or 'builtin'");
    rms->add_option("--window-ms", window_ms, "trailing window, ms");
    rms->add_flag("--pgm", pgm, "also write a PGM heatmap");
    rms->add_option("--hand-scale", hand_scale, "hand scale factor");
    rms->add_option("--out", out_dir, "output directory")->required();

    auto* throughput = app.add_subcommand("throughput", "acquisition schedule model");
    throughput->add_option("--clock-hz", clock_hz, "bus clock, Hz");
    throughput->add_option("--branches", branch_mask, "branch mask (bit 0 = digit I)");

    auto* fixture = app.add_subcommand("fixture", "export the bundled mesh and config");
    fixture->add_option("--out", out_dir, "output directory")->required();
    fixture->add_option("--hand-scale", hand_scale, "hand scale factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            require_input(scenario_path);
            require_input(mesh);
            return cmd_simulate(scenario_path, mesh, out_dir);
        }
        if (encode->parsed()) {
            require_input(counts_csv);
            return cmd_encode(counts_csv, out_dir);
        }
        if (decode->parsed()) {
            require_input(stream_path);
            return cmd_decode(stream_path, out_dir);
        }
        if (project->parsed()) {
            require_input(stream_path);
            return cmd_project(stream_path, out_dir, window, hop, uncentered);
        }
        if (similarity->parsed()) {
            for (const auto& f : channel_files) require_input(f);
            return cmd_similarity(channel_files, out_dir, max_lag);
        }
        if (reconstruct->parsed()) {
            require_input(channels_csv);
            require_input(mesh);
            return cmd_reconstruct(channels_csv, mesh, out_dir, alpha, c_offset, numerator,
                                   no_rectify, hand_scale, snapshot_frame, save_distances);
        }
        if (rms->parsed()) {
            require_input(wavefield_path);
            require_input(mesh);
            return cmd_rms_map(wavefield_path, mesh, out_dir, window_ms, pgm, hand_scale);
        }
        if (throughput->parsed()) return cmd_throughput(clock_hz, branch_mask);
        if (fixture->parsed()) return cmd_fixture(out_dir, hand_scale);
        return kExitUsage;
    } catch (const WireFormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const CorruptFrameError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const Error& e) {
        std::cerr << "stage error: " << e.what() << "\n";
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
