// core/include/intonate/signal.hpp

// Copyright 2026 The Intonate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INTONATE_SIGNAL_HPP_
#define INTONATE_SIGNAL_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "intonate/audio.hpp"
#include "intonate/matrix.hpp"

namespace intonate {

// Spectral front-end settings. Defaults are a common TTS analysis setup at
// 22.05 kHz: 1024-sample frames, 256-sample hop, 80 mel bands, 13 cepstra.
struct SpectralConfig {
  int frame_length = 1024;
  int hop_length = 256;
  int fft_size = 1024;  // must be a power of two and >= frame_length
  int mel_bands = 80;
  double fmin = 0.0;
  double fmax = 11025.0;
  int cepstral_order = 13;

  // Throws std::invalid_argument when any constraint is violated:
  // 0 < hop <= frame <= fft (power of two), 0 <= fmin < fmax <= rate/2,
  // 1 <= cepstral_order <= mel_bands.
  void validate(int sample_rate) const;
};

// Number of analysis frames for a signal of num_samples: frame i covers
// samples [i*hop, i*hop + frame_length). Throws when the signal is shorter
// than one frame.
int frame_count(std::size_t num_samples, int frame_length, int hop_length);

// HTK mel scale: 2595 * log10(1 + hz/700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filterbank on the HTK mel scale, peak weight 1 per filter.
// Shape: mel_bands x (fft_size/2 + 1).
Matrix mel_filterbank(const SpectralConfig& cfg, int sample_rate);

// Center frequencies (Hz) of the mel filters, length mel_bands.
std::vector<double> mel_center_frequencies(const SpectralConfig& cfg);

// Magnitude-squared spectrum of one frame, zero-padded to fft_size.
// Length fft_size/2 + 1. fft_size must be a power of two.
std::vector<double> power_spectrum(std::span<const double> frame, int fft_size);

// Frames the signal (Hann window, no pre-emphasis), applies the mel
// filterbank to the power spectrum and compresses with natural log,
// flooring each filter output at 1e-10. Shape: frames x mel_bands.
Matrix mel_spectrogram(const AudioBuffer& audio, const SpectralConfig& cfg);

// Mel-cepstra of a log-mel spectrogram: orthonormal DCT-II per frame.
// coeffs holds c_1..c_K (K = cepstral_order); the energy-like c_0 is kept
// separately and excluded from distortion computations.
struct MelCepstra {
  Matrix coeffs;           // frames x cepstral_order
  std::vector<double> c0;  // frames
  int frames() const { return coeffs.rows(); }
  int order() const { return coeffs.cols(); }
};

MelCepstra mel_cepstra(const Matrix& log_mel, int cepstral_order);

// Convenience: load -> mel_spectrogram -> mel_cepstra.
MelCepstra compute_cepstra(const AudioBuffer& audio, const SpectralConfig& cfg);

// Dumps a matrix as flat little-endian float64 (row-major) plus a JSON
// sidecar at <path>.json with {"shape": [r, c], "dtype": "float64",
// "order": "C"}.
void write_matrix_raw(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_raw(const std::filesystem::path& path);

}  // namespace intonate

#endif  // INTONATE_SIGNAL_HPP_
