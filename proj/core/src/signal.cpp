// core/src/signal.cpp

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

#include "intonate/signal.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace intonate {

namespace {

constexpr double kLogFloor = 1e-10;

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. n must be a power of two.
void Fft(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace

void SpectralConfig::validate(int sample_rate) const {
  if (sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");
  if (hop_length <= 0 || hop_length > frame_length) {
    throw std::invalid_argument("require 0 < hop_length <= frame_length");
  }
  if (frame_length > fft_size) {
    throw std::invalid_argument("require frame_length <= fft_size");
  }
  if (!IsPowerOfTwo(fft_size)) {
    throw std::invalid_argument("fft_size must be a power of two");
  }
  if (mel_bands < 1) throw std::invalid_argument("mel_bands must be >= 1");
  if (fmin < 0.0 || !(fmin < fmax) || fmax > sample_rate / 2.0) {
    throw std::invalid_argument("require 0 <= fmin < fmax <= sample_rate/2");
  }
  if (cepstral_order < 1 || cepstral_order > mel_bands) {
    throw std::invalid_argument("require 1 <= cepstral_order <= mel_bands");
  }
}

int frame_count(std::size_t num_samples, int frame_length, int hop_length) {
  if (frame_length <= 0 || hop_length <= 0) {
    throw std::invalid_argument("frame_length and hop_length must be positive");
  }
  if (num_samples < static_cast<std::size_t>(frame_length)) {
    throw std::runtime_error("signal shorter than one frame");
  }
  return static_cast<int>((num_samples - frame_length) / hop_length) + 1;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_center_frequencies(const SpectralConfig& cfg) {
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> centers(cfg.mel_bands);
  for (int m = 0; m < cfg.mel_bands; ++m) {
    const double mel = mel_lo + (mel_hi - mel_lo) * (m + 1) / (cfg.mel_bands + 1);
    centers[m] = mel_to_hz(mel);
  }
  return centers;
}

Matrix mel_filterbank(const SpectralConfig& cfg, int sample_rate) {
  cfg.validate(sample_rate);
  const int bins = cfg.fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);

  // mel_bands + 2 edge frequencies, equally spaced in mel.
  std::vector<double> edges(cfg.mel_bands + 2);
  for (int m = 0; m < cfg.mel_bands + 2; ++m) {
    edges[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * m / (cfg.mel_bands + 1));
  }

  Matrix fb(cfg.mel_bands, bins);
  const double bin_hz = static_cast<double>(sample_rate) / cfg.fft_size;
  for (int m = 0; m < cfg.mel_bands; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > left && f < center) {
        w = (f - left) / (center - left);
      } else if (f == center) {
        w = 1.0;
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb(m, k) = w;
    }
  }
  return fb;
}

std::vector<double> power_spectrum(std::span<const double> frame, int fft_size) {
  if (!IsPowerOfTwo(fft_size)) {
    throw std::invalid_argument("fft_size must be a power of two");
  }
  if (frame.size() > static_cast<size_t>(fft_size)) {
    throw std::invalid_argument("frame longer than fft_size");
  }
  std::vector<std::complex<double>> buf(fft_size, {0.0, 0.0});
  for (size_t i = 0; i < frame.size(); ++i) buf[i] = {frame[i], 0.0};
  Fft(buf);
  std::vector<double> power(fft_size / 2 + 1);
  for (int k = 0; k <= fft_size / 2; ++k) power[k] = std::norm(buf[k]);
  return power;
}

Matrix mel_spectrogram(const AudioBuffer& audio, const SpectralConfig& cfg) {
  cfg.validate(audio.sample_rate);
  const int frames = frame_count(audio.samples.size(), cfg.frame_length, cfg.hop_length);
  const Matrix fb = mel_filterbank(cfg, audio.sample_rate);
  const int bins = cfg.fft_size / 2 + 1;

  // Periodic Hann window.
  std::vector<double> window(cfg.frame_length);
  for (int i = 0; i < cfg.frame_length; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / cfg.frame_length);
  }

  Matrix out(frames, cfg.mel_bands);
  std::vector<double> frame(cfg.frame_length);
  for (int t = 0; t < frames; ++t) {
    const size_t offset = static_cast<size_t>(t) * cfg.hop_length;
    for (int i = 0; i < cfg.frame_length; ++i) {
      frame[i] = static_cast<double>(audio.samples[offset + i]) * window[i];
    }
    const std::vector<double> power = power_spectrum(frame, cfg.fft_size);
    for (int m = 0; m < cfg.mel_bands; ++m) {
      double acc = 0.0;
      const std::span<const double> weights = fb.row(m);
      for (int k = 0; k < bins; ++k) acc += weights[k] * power[k];
      out(t, m) = std::log(std::max(acc, kLogFloor));
    }
  }
  return out;
}

MelCepstra mel_cepstra(const Matrix& log_mel, int cepstral_order) {
  const int bands = log_mel.cols();
  if (cepstral_order < 1 || cepstral_order > bands) {
    throw std::invalid_argument("require 1 <= cepstral_order <= mel_bands");
  }
  const int frames = log_mel.rows();

  // Orthonormal DCT-II basis: row k holds a_k * cos(pi*(2n+1)*k / (2M)).
  Matrix basis(cepstral_order + 1, bands);
  for (int k = 0; k <= cepstral_order; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / bands) : std::sqrt(2.0 / bands);
    for (int n = 0; n < bands; ++n) {
      basis(k, n) = scale * std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / (2.0 * bands));
    }
  }

  MelCepstra result;
  result.coeffs = Matrix(frames, cepstral_order);
  result.c0.resize(frames);
  for (int t = 0; t < frames; ++t) {
    const std::span<const double> x = log_mel.row(t);
    for (int k = 0; k <= cepstral_order; ++k) {
      double acc = 0.0;
      const std::span<const double> b = basis.row(k);
      for (int n = 0; n < bands; ++n) acc += b[n] * x[n];
      if (k == 0) {
        result.c0[t] = acc;
      } else {
        result.coeffs(t, k - 1) = acc;
      }
    }
  }
  return result;
}

MelCepstra compute_cepstra(const AudioBuffer& audio, const SpectralConfig& cfg) {
  return mel_cepstra(mel_spectrogram(audio, cfg), cfg.cepstral_order);
}

void write_matrix_raw(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + path.string());
  bin.write(reinterpret_cast<const char*>(m.data().data()),
            static_cast<std::streamsize>(m.data().size() * sizeof(double)));

  nlohmann::json sidecar;
  sidecar["shape"] = {m.rows(), m.cols()};
  sidecar["dtype"] = "float64";
  sidecar["order"] = "C";
  std::filesystem::path meta = path;
  meta += ".json";
  std::ofstream js(meta);
  if (!js) throw std::runtime_error("cannot write " + meta.string());
  js << sidecar.dump(2) << '\n';
}

Matrix read_matrix_raw(const std::filesystem::path& path) {
  std::filesystem::path meta = path;
  meta += ".json";
  std::ifstream js(meta);
  if (!js) throw std::runtime_error("cannot open " + meta.string());
  nlohmann::json sidecar = nlohmann::json::parse(js);
  const int rows = sidecar.at("shape").at(0).get<int>();
  const int cols = sidecar.at("shape").at(1).get<int>();
  if (sidecar.at("dtype").get<std::string>() != "float64") {
    throw std::runtime_error(meta.string() + ": unsupported dtype");
  }
  Matrix m(rows, cols);
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + path.string());
  bin.read(reinterpret_cast<char*>(m.data().data()),
           static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(m.data().size() * sizeof(double))) {
    throw std::runtime_error(path.string() + ": truncated payload");
  }
  return m;
}

}  // namespace intonate
