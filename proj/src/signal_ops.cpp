#include "handwave/signal_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "handwave/fft.hpp"

namespace handwave {

namespace {

struct EigenPair {
    double value;
    Vec3 vector;
};

// Cyclic Jacobi rotations on a symmetric 3x3 matrix; returns eigenpairs
// sorted by descending eigenvalue.
std::array<EigenPair, 3> jacobi_eigen(std::array<std::array<double, 3>, 3> a) {
    std::array<std::array<double, 3>, 3> v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (int i = 0; i < 3; ++i) {
            diag += a[i][i] * a[i][i];
            for (int j = i + 1; j < 3; ++j) off += a[i][j] * a[i][j];
        }
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::array<EigenPair, 3> pairs;
    for (int i = 0; i < 3; ++i)
        pairs[i] = {a[i][i], Vec3{v[0][i], v[1][i], v[2][i]}.normalized()};
    std::sort(pairs.begin(), pairs.end(),
              [](const EigenPair& l, const EigenPair& r) { return l.value > r.value; });
    return pairs;
}

void fix_sign(Vec3& w) {
    int idx = 0;
    double best = std::abs(w[0]);
    for (int i = 1; i < 3; ++i)
        if (std::abs(w[i]) > best) {
            best = std::abs(w[i]);
            idx = i;
        }
    if (w[idx] < 0.0) w = -w;
}

double channel_sigma(const std::vector<double>& s) {
    if (s.empty()) return 0.0;
    double mean = 0.0;
    for (double x : s) mean += x;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (double x : s) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(s.size()));
}

} // namespace

Projection pca_project(const std::vector<Vec3>& window, const PcaOptions& opts) {
    if (window.empty()) throw ProcessingError("pca_project: empty window");
    const double n = static_cast<double>(window.size());

    Vec3 mean{0, 0, 0};
    if (opts.centered) {
        for (const auto& a : window) mean += a;
        mean = mean / n;
    }

    std::array<std::array<double, 3>, 3> cov{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
    double magnitude = 0.0;
    for (const auto& a : window) {
        const Vec3 d = a - mean;
        magnitude = std::max({magnitude, std::abs(a.x), std::abs(a.y), std::abs(a.z)});
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) cov[r][c] += d[r] * d[c];
    }
    for (int r = 0; r < 3; ++r)
        for (int c = r; c < 3; ++c) {
            cov[r][c] /= n;
            cov[c][r] = cov[r][c];
        }

    // All-zero windows, and windows whose variance vanishes against their
    // magnitude (a constant reading), have no principal direction.
    const double trace = cov[0][0] + cov[1][1] + cov[2][2];
    Projection out;
    if (magnitude == 0.0 || trace <= 1e-24 * magnitude * magnitude) {
        out.w = Vec3{0.0, 0.0, 1.0};
        out.degenerate = true;
        if (opts.centered) {
            out.samples.assign(window.size(), 0.0);
        } else {
            out.samples.reserve(window.size());
            for (const auto& a : window) out.samples.push_back(a.dot(out.w));
        }
        return out;
    }

    const auto pairs = jacobi_eigen(cov);
    out.lambda_max = pairs[0].value;
    out.lambda_mid = pairs[1].value;
    out.lambda_min = pairs[2].value;

    Vec3 w = pairs[0].vector;
    if (pairs[1].value > 0.0 && pairs[0].value < opts.tie_ratio * pairs[1].value) {
        out.ambiguous = true;
        double best = -1.0;
        for (const auto& p : pairs) {
            if (p.value * opts.tie_ratio < pairs[0].value) continue;
            const double score = std::abs(p.vector.z);
            if (score > best) {
                best = score;
                w = p.vector;
            }
        }
    }
    fix_sign(w);
    out.w = w;

    out.samples.reserve(window.size());
    for (const auto& a : window) out.samples.push_back((a - mean).dot(w));
    return out;
}

std::vector<double> project_onto(const Vec3& w, const std::vector<Vec3>& samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& a : samples) out.push_back(a.dot(w));
    return out;
}

void ProjectionWindowParams::validate(double rate) const {
    if (!(length > 100 && length < 1000))
        throw ProcessingError("window length must satisfy 100 < N < 1000");
    if (static_cast<double>(length) / rate >= 1.0)
        throw ProcessingError("window must span less than one second");
    if (hop < 1 || hop > length)
        throw ProcessingError("hop must lie in [1, N]");
}

std::vector<ScalarChannel> project_stream(const FrameStream& stream,
                                          const ProjectionWindowParams& params,
                                          const PcaOptions& opts) {
    params.validate(stream.rate);
    const std::size_t len = stream.frames.size();
    const std::size_t N = static_cast<std::size_t>(params.length);
    const std::size_t hop = static_cast<std::size_t>(params.hop);
    if (len < N) throw ProcessingError("stream shorter than one projection window");
    for (const auto& f : stream.frames)
        if (f.unit != Unit::MetersPerSecondSquared)
            throw ProcessingError("project_stream expects a calibrated stream");

    std::vector<ScalarChannel> channels(stream.sensor_ids.size());
    std::vector<Vec3> window(N);
    for (std::size_t s = 0; s < stream.sensor_ids.size(); ++s) {
        ScalarChannel& ch = channels[s];
        ch.id = stream.sensor_ids[s];
        ch.samples.assign(len, 0.0);
        const std::size_t last_start = ((len - N) / hop) * hop;
        for (std::size_t start = 0;; start += hop) {
            for (std::size_t k = 0; k < N; ++k) window[k] = stream.frames[start + k].values[s];
            Projection proj = pca_project(window, opts);

            const bool last = start == last_start;
            const std::size_t out_end = last ? len : std::min(start + hop, len);
            Vec3 mean{0, 0, 0};
            if (opts.centered) {
                for (std::size_t k = 0; k < N; ++k) mean += window[k];
                mean = mean / static_cast<double>(N);
            }
            for (std::size_t t = start; t < out_end; ++t)
                ch.samples[t] = (stream.frames[t].values[s] - mean).dot(proj.w);

            ch.degenerate = ch.degenerate || proj.degenerate;
            ch.ambiguous = ch.ambiguous || proj.ambiguous;
            if (last) {
                ch.w = proj.w;
                ch.lambda_max = proj.lambda_max;
                break;
            }
        }
    }
    return channels;
}

std::size_t rms_window_samples(double window_ms, double rate) {
    if (!(window_ms > 0.0)) throw ProcessingError("RMS window must be positive");
    return static_cast<std::size_t>(std::floor(window_ms / 1000.0 * rate));
}

double trailing_rms(const std::vector<double>& samples, double window_ms, double rate) {
    const std::size_t w = rms_window_samples(window_ms, rate);
    if (w == 0) throw ProcessingError("RMS window shorter than one sample");
    if (w > samples.size()) throw ProcessingError("RMS window longer than the stream");
    double acc = 0.0;
    for (std::size_t i = samples.size() - w; i < samples.size(); ++i)
        acc += samples[i] * samples[i];
    return std::sqrt(acc / static_cast<double>(w));
}

std::vector<double> rms_map(const std::vector<ScalarChannel>& channels,
                            double window_ms, double rate) {
    std::vector<double> out;
    out.reserve(channels.size());
    for (const auto& ch : channels) out.push_back(trailing_rms(ch.samples, window_ms, rate));
    return out;
}

double similarity(const std::vector<ScalarChannel>& A,
                  const std::vector<ScalarChannel>& B,
                  const SimilarityOptions& opts) {
    if (A.size() != B.size() || A.empty())
        throw ProcessingError("similarity requires matching nonempty channel sets");
    const std::size_t n = A[0].samples.size();
    if (n == 0) throw ProcessingError("similarity requires nonempty channels");
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i].id != B[i].id)
            throw ProcessingError("similarity channel ids do not match");
        if (A[i].samples.size() != n || B[i].samples.size() != n)
            throw ProcessingError("similarity requires equal channel lengths");
    }

    const double tau = 1.0 / opts.rate;
    const int max_lag =
        opts.max_lag > 0
            ? opts.max_lag
            : static_cast<int>(std::min<double>(static_cast<double>(n) - 1.0,
                                                opts.rate / 2.0));

    double numerator = 0.0, denominator = 0.0;
    std::size_t included = 0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        const double sig_a = channel_sigma(A[i].samples);
        const double sig_b = channel_sigma(B[i].samples);
        if (sig_a <= opts.sigma_floor || sig_b <= opts.sigma_floor) continue;
        ++included;

        const auto corr = circular_cross_correlation(A[i].samples, B[i].samples, max_lag);
        double peak = 0.0;
        for (double c : corr) peak = std::max(peak, std::abs(c));
        numerator += peak * tau / (sig_a * sig_b);

        double energy = 0.0;
        for (double x : B[i].samples) energy += x * x;
        denominator += energy * tau / (sig_b * sig_b);
    }
    if (included == 0)
        throw UndefinedSimilarityError(
            "similarity undefined: every channel has zero variance");
    return numerator / denominator;
}

SimilarityMatrix similarity_matrix(
    const std::vector<std::vector<ScalarChannel>>& gestures,
    const std::vector<std::string>& names, const SimilarityOptions& opts) {
    if (gestures.size() != names.size())
        throw ProcessingError("similarity_matrix: names do not match gestures");
    SimilarityMatrix m;
    m.names = names;
    m.scores.assign(gestures.size(), std::vector<double>(gestures.size(), 0.0));
    for (std::size_t i = 0; i < gestures.size(); ++i)
        for (std::size_t j = 0; j < gestures.size(); ++j)
            m.scores[i][j] = similarity(gestures[i], gestures[j], opts);
    return m;
}

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;

    // RBJ low-pass section.
    static Biquad lowpass(double cutoff_hz, double rate, double q) {
        const double w0 = 2.0 * kPi * cutoff_hz / rate;
        const double cw = std::cos(w0), sw = std::sin(w0);
        const double alpha = sw / (2.0 * q);
        const double a0 = 1.0 + alpha;
        Biquad s;
        s.b0 = (1.0 - cw) / 2.0 / a0;
        s.b1 = (1.0 - cw) / a0;
        s.b2 = s.b0;
        s.a1 = -2.0 * cw / a0;
        s.a2 = (1.0 - alpha) / a0;
        return s;
    }

    // Steady-state (direct form II transposed) state for a unit input; a
    // constant series then passes through with no start-up transient.
    void steady_state(double input, double& z1, double& z2) const {
        const double gain = (b0 + b1 + b2) / (1.0 + a1 + a2);
        z2 = (b2 - a2 * gain) * input;
        z1 = (b1 - a1 * gain + b2 - a2 * gain) * input;
    }

    void filter(std::vector<double>& x) const {
        double z1, z2;
        steady_state(x.empty() ? 0.0 : x.front(), z1, z2);
        for (double& v : x) {
            const double y = b0 * v + z1;
            z1 = b1 * v - a1 * y + z2;
            z2 = b2 * v - a2 * y;
            v = y;
        }
    }
};

void forward_cascade(std::vector<double>& x, const std::vector<Biquad>& sections) {
    for (const auto& s : sections) s.filter(x);
}

} // namespace

std::vector<double> zero_phase_lowpass(const std::vector<double>& samples,
                                       double cutoff_hz, double rate) {
    if (!(cutoff_hz > 0.0)) throw ProcessingError("cutoff must be positive");
    if (cutoff_hz >= rate / 2.0)
        throw ProcessingError("cutoff must be below the Nyquist rate");
    if (samples.size() < 4) throw ProcessingError("series too short to filter");

    // Order-4 Butterworth as two sections (pole-angle Q values).
    const std::vector<Biquad> sections = {
        Biquad::lowpass(cutoff_hz, rate, 0.5411961001461970),
        Biquad::lowpass(cutoff_hz, rate, 1.3065629648763766),
    };

    const std::size_t n = samples.size();
    const std::size_t pad = std::min<std::size_t>(
        n - 1,
        std::max<std::size_t>(15, static_cast<std::size_t>(std::ceil(3.0 * rate / cutoff_hz))));

    // Odd reflection at both ends.
    std::vector<double> work;
    work.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) work.push_back(2.0 * samples[0] - samples[i]);
    work.insert(work.end(), samples.begin(), samples.end());
    for (std::size_t i = 1; i <= pad; ++i)
        work.push_back(2.0 * samples[n - 1] - samples[n - 1 - i]);

    forward_cascade(work, sections);
    std::reverse(work.begin(), work.end());
    forward_cascade(work, sections);
    std::reverse(work.begin(), work.end());

    return std::vector<double>(work.begin() + static_cast<std::ptrdiff_t>(pad),
                               work.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

std::vector<double> lowpass_diff(const std::vector<double>& velocity,
                                 double cutoff_hz, double rate) {
    const std::vector<double> v = zero_phase_lowpass(velocity, cutoff_hz, rate);
    const std::size_t n = v.size();
    std::vector<double> a(n, 0.0);
    if (n >= 2) {
        a[0] = (v[1] - v[0]) * rate;
        a[n - 1] = (v[n - 1] - v[n - 2]) * rate;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) a[i] = (v[i + 1] - v[i - 1]) * rate / 2.0;
    return a;
}

} // namespace handwave
