#pragma once

#include <cstdint>
#include <vector>

#include "affect/tensor.hpp"
#include "affect/wav.hpp"

namespace affect {

// Standard MFCC configuration: 13 coefficients out of 26 triangular mel
// filters spanning 0 Hz to Nyquist, pre-emphasis 0.97, Hamming window,
// log floor 1e-10, orthonormal DCT-II.
struct MfccConfig {
  std::size_t num_coefficients = 13;
  std::size_t num_filters = 26;
  double pre_emphasis = 0.97;
  double log_floor = 1e-10;
};

// Autocorrelation pitch tracking over the 50-500 Hz band. Frames shorter
// than two periods of min_hz, silent frames, and frames whose normalized
// autocorrelation peak falls below the voicing threshold report 0 (unvoiced).
struct PitchConfig {
  double min_hz = 50.0;
  double max_hz = 500.0;
  double voicing_threshold = 0.3;
};

// Anti-alias low-pass (windowed-sinc FIR, cutoff 0.45 * target_hz) followed
// by decimation to round(N * target / source) samples. Upsampling raises
// UnsupportedError; an equal rate returns the input unchanged.
AudioSegment resample(const AudioSegment& seg, std::uint32_t target_hz);

// Overlapping sample windows: count = floor((N - W)/S) + 1 for N >= W; a
// segment shorter than one window yields a single zero-padded frame.
// Requires window_ms >= step_ms > 0 and a non-empty segment.
std::vector<std::vector<double>> frame(const AudioSegment& seg,
                                       double window_ms, double step_ms);

Tensor mfcc(const std::vector<double>& frame_samples,
            std::uint32_t sample_rate, const MfccConfig& cfg = {});

// Regression delta over +/-w neighboring frames with edge replication;
// apply twice for delta-delta.
std::vector<Tensor> delta(const std::vector<Tensor>& features,
                          std::size_t w = 2);

double pitch(const std::vector<double>& frame_samples,
             std::uint32_t sample_rate, const PitchConfig& cfg = {});

// Mean of squared samples.
double energy(const std::vector<double>& frame_samples);

// Sign changes per sample pair: (count of x[i-1]*x[i] < 0) / (N - 1).
double zcr(const std::vector<double>& frame_samples);

// Per-frame 42-value acoustic/prosodic vector over 25 ms / 10 ms frames:
// [0,13) MFCC, [13,26) delta, [26,39) delta-delta, 39 pitch, 40 energy,
// 41 zero-crossing rate.
std::vector<Tensor> frame_features(const AudioSegment& seg,
                                   double window_ms = 25.0,
                                   double step_ms = 10.0,
                                   const MfccConfig& mfcc_cfg = {},
                                   const PitchConfig& pitch_cfg = {});

constexpr std::size_t kFrameFeatureDim = 42;

}  // namespace affect
