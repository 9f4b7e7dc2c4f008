// Independent reference implementations used only by tests. These stay
// deliberately separate from the library code paths they check.
#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <cmath>
#include <vector>

#include "handwave/geometry.hpp"

namespace oracles {

/// Eigenvalues of a symmetric 3x3 matrix via the trigonometric solution of
/// the characteristic cubic, descending order.
inline std::array<double, 3> symmetric_eigenvalues(const std::array<std::array<double, 3>, 3>& a) {
    const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    if (p1 == 0.0) {
        std::array<double, 3> d{a[0][0], a[1][1], a[2][2]};
        std::sort(d.begin(), d.end(), std::greater<double>());
        return d;
    }
    const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                      (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    std::array<std::array<double, 3>, 3> b;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
    const double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                        b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                        b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    double r = detb / 2.0;
    r = std::max(-1.0, std::min(1.0, r));
    const double phi = std::acos(r) / 3.0;
    const double l1 = q + 2.0 * p * std::cos(phi);
    const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * handwave::kPi / 3.0);
    return {l1, 3.0 * q - l1 - l3, l3};
}

/// Covariance (divisor n, mean removed) of a 3-axis window.
inline std::array<std::array<double, 3>, 3> covariance(
    const std::vector<handwave::Vec3>& window) {
    handwave::Vec3 mean{0, 0, 0};
    for (const auto& v : window) mean += v;
    mean = mean / static_cast<double>(window.size());
    std::array<std::array<double, 3>, 3> c{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
    for (const auto& v : window) {
        const handwave::Vec3 d = v - mean;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c[i][j] += d[i] * d[j];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] /= static_cast<double>(window.size());
    return c;
}

/// Direct-sum circular cross-correlation, O(n * lags).
inline std::vector<double> direct_circular_xcorr(const std::vector<double>& a,
                                                 const std::vector<double>& b, int max_lag) {
    const int n = static_cast<int>(a.size());
    std::vector<double> out(2 * static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (int t = 0; t < n; ++t) {
            const int idx = ((t + lag) % n + n) % n;
            acc += a[static_cast<std::size_t>(t)] * b[static_cast<std::size_t>(idx)];
        }
        out[static_cast<std::size_t>(lag + max_lag)] = acc;
    }
    return out;
}

/// Signal power at one frequency (Goertzel).
inline double goertzel_power(const std::vector<double>& x, double freq_hz, double rate) {
    const double w = 2.0 * handwave::kPi * freq_hz / rate;
    const double c = std::cos(w);
    double s0 = 0.0, s1 = 0.0;
    for (double v : x) {
        const double s = v + 2.0 * c * s0 - s1;
        s1 = s0;
        s0 = s;
    }
    return s0 * s0 + s1 * s1 - 2.0 * c * s0 * s1;
}

/// Integer-Hz peak of a spectrum, searched in [1, rate/2).
inline double spectral_peak_hz(const std::vector<double>& x, double rate) {
    double best_power = -1.0;
    double best_f = 0.0;
    for (int f = 1; f < static_cast<int>(rate / 2.0); ++f) {
        const double p = goertzel_power(x, f, rate);
        if (p > best_power) {
            best_power = p;
            best_f = f;
        }
    }
    return best_f;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

/// Rotation matrix from an axis-angle sample of a seeded engine.
inline handwave::Mat3 random_rotation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    handwave::Vec3 axis;
    do {
        axis = {uni(rng), uni(rng), uni(rng)};
    } while (axis.norm() < 1e-3 || axis.norm() > 1.0);
    axis = axis.normalized();
    const double angle = (uni(rng) + 1.0) * handwave::kPi;
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    const double x = axis.x, y = axis.y, z = axis.z;
    handwave::Mat3 r;
    r(0, 0) = t * x * x + c;     r(0, 1) = t * x * y - s * z; r(0, 2) = t * x * z + s * y;
    r(1, 0) = t * x * y + s * z; r(1, 1) = t * y * y + c;     r(1, 2) = t * y * z - s * x;
    r(2, 0) = t * x * z - s * y; r(2, 1) = t * y * z + s * x; r(2, 2) = t * z * z + c;
    return r;
}

} // namespace oracles
