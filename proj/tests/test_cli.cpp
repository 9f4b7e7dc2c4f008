#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "handwave/hand_model.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli() { return HANDWAVE_CLI_PATH; }

int run(const std::string& args) {
    const std::string cmd = std::string(cli()) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string data_path(const char* name) {
    return std::string(HANDWAVE_TEST_DATA_DIR) + "/" + name;
}

/// fnv64 values from a manifest, in order of appearance.
std::vector<std::string> manifest_hashes(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<std::string> hashes;
    const std::string key = "\"fnv64\": \"";
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        pos += key.size();
        hashes.push_back(text.substr(pos, 16));
    }
    return hashes;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::path("/tmp/handwave_cli") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const char* sub = nullptr) const {
        return sub ? (path / sub).string() : path.string();
    }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("throughput subcommand succeeds") {
    CHECK(run("throughput --clock-hz 1.6e6") == 0);
}

TEST_CASE("unknown flags exit with the usage code") {
    CHECK(run("throughput --bogus-flag 1") == 64);
    CHECK(run("frobnicate") == 64);
}

TEST_CASE("missing input files exit with the no-input code") {
    TempDir tmp("missing");
    CHECK(run("decode --stream /nonexistent.whv --out " + tmp.str("out")) == 66);
    CHECK(run("simulate --scenario /nonexistent.toml --out " + tmp.str("out2")) == 66);
}

TEST_CASE("decoding the golden stream reproduces the committed CSV byte for byte") {
    TempDir tmp("golden");
    CHECK(run("decode --stream " + data_path("golden_stream.whv") + " --out " + tmp.str()) == 0);
    CHECK(read_file(tmp.str("counts.csv")) == read_file(data_path("golden_counts.csv")));
}

TEST_CASE("corrupt streams exit with the data-error code") {
    TempDir tmp("corrupt");
    std::string bytes = read_file(data_path("golden_stream.whv"));
    bytes[100] = static_cast<char>(bytes[100] ^ 0x40);
    const std::string bad = tmp.str("bad.whv");
    std::ofstream(bad, std::ios::binary) << bytes;
    CHECK(run("decode --stream " + bad + " --out " + tmp.str("out")) == 65);

    // wrong file kind for the stage: a CSV is not a wave field
    CHECK(run("rms-map --wavefield " + data_path("golden_counts.csv") + " --out " +
              tmp.str("out2")) == 65);
}

TEST_CASE("encode-decode CLI round trip") {
    TempDir tmp("roundtrip");
    REQUIRE(run("decode --stream " + data_path("golden_stream.whv") + " --out " +
                tmp.str("dec")) == 0);
    REQUIRE(run("encode --counts " + tmp.str("dec") + "/counts.csv --out " +
                tmp.str("enc")) == 0);
    CHECK(read_file(tmp.str("enc") + "/stream.whv") ==
          read_file(data_path("golden_stream.whv")));
}

TEST_CASE("simulate, project, reconstruct and rms-map chain on a short scenario") {
    TempDir tmp("chain");
    const std::string scenario = tmp.str("quick.toml");
    {
        std::ofstream out(scenario);
        out << "schema = 1\nsource_sensor = 31\nwaveform = sinusoid\n"
               "frequency_hz = 100\namplitude_ms2 = 5.0\nonset_s = 0.05\n"
               "duration_s = 0.3\nsim_seconds = 0.5\nnoise_g = 0.0005\n"
               "seed = 9\nrange_g = 4\n";
    }
    REQUIRE(run("simulate --scenario " + scenario + " --out " + tmp.str("sim")) == 0);
    REQUIRE(run("project --stream " + tmp.str("sim") + "/stream.whv --out " +
                tmp.str("proj")) == 0);
    REQUIRE(run("reconstruct --channels " + tmp.str("proj") + "/channels.csv --out " +
                tmp.str("rec")) == 0);
    REQUIRE(run("rms-map --wavefield " + tmp.str("rec") + "/wavefield.whf --pgm --out " +
                tmp.str("rms")) == 0);
    CHECK(fs::exists(tmp.str("rms") + "/rms_map.csv"));
    CHECK(fs::exists(tmp.str("rms") + "/rms_map.pgm"));
    CHECK(fs::exists(tmp.str("rms") + "/manifest.json"));

    // the stimulated digit (source sensor 31 = digit II) wins the RMS map
    {
        std::ifstream csv(tmp.str("rms") + "/rms_map.csv");
        REQUIRE(csv);
        std::string line;
        std::getline(csv, line); // header
        std::size_t argmax = 0;
        double best = -1.0;
        while (std::getline(csv, line)) {
            const std::size_t first = line.find(',');
            const std::size_t last = line.rfind(',');
            const double value = std::stod(line.substr(last + 1));
            if (value > best) {
                best = value;
                argmax = static_cast<std::size_t>(std::stoull(line.substr(0, first)));
            }
        }
        const handwave::HandFixture fx = handwave::make_hand_fixture();
        CHECK(fx.regions.at(argmax) ==
              handwave::region_for_digit(handwave::Digit::II));
    }

    // reproducibility: an identical run yields identical output hashes
    REQUIRE(run("simulate --scenario " + scenario + " --out " + tmp.str("sim2")) == 0);
    CHECK(manifest_hashes(tmp.str("sim") + "/manifest.json") ==
          manifest_hashes(tmp.str("sim2") + "/manifest.json"));
}

TEST_CASE("similarity of a gesture with itself has a unit diagonal") {
    TempDir tmp("selfsim");
    const std::string scenario = tmp.str("quick.toml");
    {
        std::ofstream out(scenario);
        out << "schema = 1\nsource_sensor = 21\nfrequency_hz = 80\n"
               "duration_s = 0.3\nonset_s = 0.05\nsim_seconds = 0.5\nseed = 3\n"
               "amplitude_ms2 = 4\nnoise_g = 0.0005\nrange_g = 4\n";
    }
    REQUIRE(run("simulate --scenario " + scenario + " --out " + tmp.str("sim")) == 0);
    REQUIRE(run("project --stream " + tmp.str("sim") + "/stream.whv --out " +
                tmp.str("proj")) == 0);
    REQUIRE(run("similarity --channels " + tmp.str("proj") + "/channels.csv " +
                tmp.str("proj") + "/channels.csv --out " + tmp.str("simm")) == 0);

    std::ifstream csv(tmp.str("simm") + "/similarity.csv");
    REQUIRE(csv);
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    const std::size_t comma = row.find(',');
    const double diag = std::stod(row.substr(comma + 1));
    CHECK(diag == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stage dependency mismatches exit with the stage code") {
    TempDir tmp("stage");
    // channels CSV whose sensors do not form the full array
    const std::string csv = tmp.str("short.csv");
    {
        std::ofstream out(csv);
        out << "# rate_hz 1310\nt,31,32\n0.0,1.0,2.0\n0.000763,1.5,2.5\n";
    }
    CHECK(run("reconstruct --channels " + csv + " --out " + tmp.str("rec")) == 69);
}

} // TEST_SUITE
