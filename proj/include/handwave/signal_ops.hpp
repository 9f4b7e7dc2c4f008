#pragma once

#include <string>
#include <vector>

#include "handwave/core_types.hpp"
#include "handwave/geometry.hpp"

namespace handwave {

// --------------------------------------------------------------------------
// Principal-component projection of 3-axis windows onto a scalar channel.
// --------------------------------------------------------------------------

struct PcaOptions {
    /// Remove the window mean before forming the covariance (and project the
    /// mean-removed samples). The uncentered mode uses the raw second-moment
    /// matrix and projects the raw samples.
    bool centered = true;
    /// Top eigenvalue ratio below which the direction is flagged ambiguous.
    double tie_ratio = 1.01;
};

struct Projection {
    Vec3 w;                       // unit projection axis
    double lambda_max = 0.0;      // leading covariance eigenvalue
    double lambda_mid = 0.0;
    double lambda_min = 0.0;
    std::vector<double> samples;  // projected scalar signal
    bool degenerate = false;      // all-zero window, w = (0,0,1) by convention
    bool ambiguous = false;       // near-equal top eigenvalues, tie-broken
};

/// Project one window of 3-axis samples onto its leading principal
/// component. Sign convention: the component of w with the largest magnitude
/// is made positive. Near-equal top eigenvalues are tie-broken toward the
/// axis maximizing |w . z|. An all-zero window yields a zero channel with
/// w = (0,0,1), flagged degenerate. No temporal smoothing is applied.
Projection pca_project(const std::vector<Vec3>& window, const PcaOptions& opts = {});

/// Plain linear projection of 3-axis samples onto a fixed axis.
std::vector<double> project_onto(const Vec3& w, const std::vector<Vec3>& samples);

/// One sensor's scalar channel.
struct ScalarChannel {
    int id = 0;
    std::vector<double> samples;
    Vec3 w;                   // projection axis of the final window
    double lambda_max = 0.0;  // leading eigenvalue of the final window
    bool degenerate = false;  // any window flagged degenerate
    bool ambiguous = false;   // any window flagged ambiguous
};

/// Sliding-window projection limits: windows of N samples every `hop`
/// samples, 100 < N < 1000 and N below one second of data.
struct ProjectionWindowParams {
    int length = 256;  // N
    int hop = 128;     // defaults to N/2

    void validate(double rate) const;
};

/// Project every sensor of a calibrated stream through sliding-window PCA.
/// Each window's axis projects the window's first `hop` samples (the final
/// window extends to the stream end), so the output has one scalar per
/// frame. Throws ProcessingError if the stream is shorter than one window
/// or not calibrated to m/s^2.
std::vector<ScalarChannel> project_stream(const FrameStream& stream,
                                          const ProjectionWindowParams& params = {},
                                          const PcaOptions& opts = {});

// --------------------------------------------------------------------------
// Amplitude and similarity measures.
// --------------------------------------------------------------------------

/// Number of samples in a trailing window of window_ms at the given rate.
std::size_t rms_window_samples(double window_ms, double rate);

/// Root-mean-square of the trailing window_ms of one channel.
double trailing_rms(const std::vector<double>& samples, double window_ms, double rate);

/// Trailing-window RMS per channel. Throws ProcessingError if the window is
/// longer than the stream or not positive.
std::vector<double> rms_map(const std::vector<ScalarChannel>& channels,
                            double window_ms, double rate);

struct SimilarityOptions {
    double rate = 1310.0;
    /// Lag search bound in samples; <= 0 picks min(len - 1, rate / 2).
    int max_lag = 0;
    /// Channels with standard deviation at or below this are excluded from
    /// numerator and denominator alike.
    double sigma_floor = 0.0;
};

/// Gesture similarity score: per-sensor maximum-magnitude cross-correlation
/// over lags, normalized by the channel standard deviations, against the
/// energy of B's channels. Correlation integrals are discretized as circular
/// sums times the sample period. Asymmetric in (A, B) by construction.
/// Throws UndefinedSimilarityError when every channel pair has zero sigma
/// and ProcessingError on length or id mismatches.
double similarity(const std::vector<ScalarChannel>& A,
                  const std::vector<ScalarChannel>& B,
                  const SimilarityOptions& opts = {});

/// Pairwise scores for a set of named gestures; entry (i, j) = S(i, j).
struct SimilarityMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> scores;
};

SimilarityMatrix similarity_matrix(
    const std::vector<std::vector<ScalarChannel>>& gestures,
    const std::vector<std::string>& names, const SimilarityOptions& opts = {});

// --------------------------------------------------------------------------
// Reference-instrument utilities.
// --------------------------------------------------------------------------

/// Zero-phase Butterworth low-pass (order-4 cascade run forward and
/// backward). Throws ProcessingError if cutoff_hz is not below rate / 2.
std::vector<double> zero_phase_lowpass(const std::vector<double>& samples,
                                       double cutoff_hz, double rate);

/// Low-pass the velocity series then differentiate it (central differences)
/// into acceleration.
std::vector<double> lowpass_diff(const std::vector<double>& velocity,
                                 double cutoff_hz, double rate);

} // namespace handwave
