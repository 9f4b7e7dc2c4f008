#pragma once

#include <complex>
#include <vector>

namespace handwave {

/// In-place complex FFT, any length (radix-2 for powers of two, Bluestein's
/// chirp-z otherwise). inverse=true applies the unscaled inverse transform;
/// callers divide by n where needed.
void fft(std::vector<std::complex<double>>& data, bool inverse);

/// Circular cross-correlation c(lag) = sum_t a(t) * b((t + lag) mod n),
/// returned for lag = -max_lag..max_lag (vector length 2*max_lag + 1),
/// computed via length-n FFTs. Requires equal nonzero lengths.
std::vector<double> circular_cross_correlation(const std::vector<double>& a,
                                               const std::vector<double>& b,
                                               int max_lag);

} // namespace handwave
