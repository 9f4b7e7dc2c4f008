#include "handwave/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "handwave/errors.hpp"
#include "handwave/geometry.hpp"

namespace handwave {

namespace {

using cplx = std::complex<double>;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein: expresses a length-n DFT as a convolution, done at a power of
// two >= 2n - 1.
void fft_bluestein(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the angle argument small
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }

    std::vector<cplx> x(m, cplx(0.0, 0.0)), y(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);

    fft_pow2(x, false);
    fft_pow2(y, false);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x, true);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * inv_m * chirp[k];
}

} // namespace

void fft(std::vector<cplx>& data, bool inverse) {
    if (data.empty()) return;
    if (data.size() == 1) return;
    if (is_pow2(data.size()))
        fft_pow2(data, inverse);
    else
        fft_bluestein(data, inverse);
}

std::vector<double> circular_cross_correlation(const std::vector<double>& a,
                                               const std::vector<double>& b,
                                               int max_lag) {
    if (a.empty() || a.size() != b.size())
        throw ProcessingError("cross-correlation requires equal nonzero lengths");
    if (max_lag < 0) throw ProcessingError("max_lag must be nonnegative");
    const std::size_t n = a.size();

    std::vector<cplx> fa(n), fb(n);
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = cplx(a[i], 0.0);
        fb[i] = cplx(b[i], 0.0);
    }
    fft(fa, false);
    fft(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] = std::conj(fa[i]) * fb[i];
    fft(fa, true);

    std::vector<double> out(2 * static_cast<std::size_t>(max_lag) + 1);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        const std::size_t idx =
            static_cast<std::size_t>(((lag % static_cast<int>(n)) + static_cast<int>(n)) %
                                     static_cast<int>(n));
        out[static_cast<std::size_t>(lag + max_lag)] = fa[idx].real() * inv_n;
    }
    return out;
}

} // namespace handwave
