// tests/signal_test.cpp

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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "intonate/audio.hpp"
#include "intonate/matrix.hpp"
#include "intonate/signal.hpp"
#include "test_util.hpp"

using intonate::AudioBuffer;
using intonate::Matrix;
using intonate::MelCepstra;
using intonate::SpectralConfig;

namespace {

AudioBuffer Sine(double freq, double seconds, int sample_rate = 22050,
                 double amplitude = 0.5) {
  AudioBuffer audio;
  audio.sample_rate = sample_rate;
  const auto n = static_cast<size_t>(seconds * sample_rate);
  audio.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    audio.samples[i] = static_cast<float>(
        amplitude * std::sin(2.0 * std::numbers::pi * freq * i / sample_rate));
  }
  return audio;
}

// Direct O(n^2) DFT magnitude-squared, the reference for the fast path.
std::vector<double> BruteForcePower(const std::vector<double>& x, int fft_size) {
  std::vector<double> power(fft_size / 2 + 1);
  for (int k = 0; k <= fft_size / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (size_t n = 0; n < x.size(); ++n) {
      const double angle = -2.0 * std::numbers::pi * k * static_cast<double>(n) / fft_size;
      re += x[n] * std::cos(angle);
      im += x[n] * std::sin(angle);
    }
    power[k] = re * re + im * im;
  }
  return power;
}

// Direct orthonormal DCT-II of one vector, coefficient k.
double BruteForceDct(const std::vector<double>& x, int k) {
  const auto m = static_cast<int>(x.size());
  const double scale = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
  double acc = 0.0;
  for (int n = 0; n < m; ++n) {
    acc += x[n] * std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / (2.0 * m));
  }
  return scale * acc;
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("wav io round trips mono pcm16") {
  testutil::TempDir tmp;
  AudioBuffer audio = Sine(220.0, 1.0);
  const auto path = tmp.file("tone.wav");
  intonate::save_wav(path, audio);
  const AudioBuffer loaded = intonate::load_wav(path);
  CHECK(loaded.sample_rate == 22050);
  REQUIRE(loaded.samples.size() == audio.samples.size());
  CHECK(loaded.duration() == doctest::Approx(1.0));
  for (size_t i = 0; i < loaded.samples.size(); i += 997) {
    CHECK(loaded.samples[i] == doctest::Approx(audio.samples[i]).epsilon(1e-3));
  }
}

TEST_CASE("load_wav rejects what it cannot represent") {
  testutil::TempDir tmp;

  SUBCASE("stereo") {
    // Hand-build a 2-channel header.
    std::string bytes;
    auto u32 = [&bytes](uint32_t v) {
      for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    };
    auto u16 = [&bytes](uint16_t v) {
      bytes.push_back(static_cast<char>(v & 0xFF));
      bytes.push_back(static_cast<char>((v >> 8) & 0xFF));
    };
    bytes += "RIFF"; u32(36 + 4); bytes += "WAVE";
    bytes += "fmt "; u32(16); u16(1); u16(2); u32(22050); u32(22050 * 4); u16(4); u16(16);
    bytes += "data"; u32(4); u32(0);
    const auto path = tmp.file("stereo.wav");
    testutil::WriteFile(path, bytes);
    CHECK_THROWS_WITH_AS(intonate::load_wav(path), doctest::Contains("mono"),
                         std::runtime_error);
  }
  SUBCASE("truncated payload") {
    AudioBuffer audio = Sine(220.0, 0.2);
    const auto path = tmp.file("trunc.wav");
    intonate::save_wav(path, audio);
    std::string bytes = testutil::ReadFile(path);
    bytes.resize(bytes.size() / 2);
    testutil::WriteFile(path, bytes);
    CHECK_THROWS_AS(intonate::load_wav(path), std::runtime_error);
  }
  SUBCASE("not a wav at all") {
    const auto path = tmp.file("junk.wav");
    testutil::WriteFile(path, "definitely not riff");
    CHECK_THROWS_AS(intonate::load_wav(path), std::runtime_error);
  }
}

TEST_CASE("all-zero payload loads as an all-zero buffer") {
  testutil::TempDir tmp;
  AudioBuffer zeros;
  zeros.sample_rate = 22050;
  zeros.samples.assign(22050, 0.0f);
  const auto path = tmp.file("zeros.wav");
  intonate::save_wav(path, zeros);
  const AudioBuffer loaded = intonate::load_wav(path);
  for (const float s : loaded.samples) CHECK(s == 0.0f);
}

TEST_CASE("frame_count matches a counting loop over random sizes") {
  CHECK(intonate::frame_count(1024, 1024, 256) == 1);
  CHECK_THROWS_AS(intonate::frame_count(1023, 1024, 256), std::runtime_error);

  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int frame = 4 + static_cast<int>(rng() % 64);
    const int hop = 1 + static_cast<int>(rng() % frame);
    const size_t n = frame + rng() % 500;
    int counted = 0;
    for (size_t start = 0; start + frame <= n; start += hop) ++counted;
    CHECK(intonate::frame_count(n, frame, hop) == counted);
  }
}

TEST_CASE("power_spectrum equals the direct dft") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (const int fft_size : {16, 64, 256}) {
    std::vector<double> x(fft_size);
    for (double& v : x) v = dist(rng);
    const auto fast = intonate::power_spectrum(x, fft_size);
    const auto slow = BruteForcePower(x, fft_size);
    REQUIRE(fast.size() == slow.size());
    for (size_t k = 0; k < fast.size(); ++k) {
      CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-9).scale(fft_size));
    }
  }
}

TEST_CASE("mel filterbank centers follow the mel scale") {
  SpectralConfig cfg;
  const auto centers = intonate::mel_center_frequencies(cfg);
  REQUIRE(static_cast<int>(centers.size()) == cfg.mel_bands);
  // Independent re-derivation of a few centers from the scale definition.
  const double mel_hi = 2595.0 * std::log10(1.0 + cfg.fmax / 700.0);
  for (const int m : {0, 13, 40, 79}) {
    const double mel = mel_hi * (m + 1) / (cfg.mel_bands + 1);
    const double hz = 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
    CHECK(centers[m] == doctest::Approx(hz).epsilon(1e-12));
  }
  CHECK(std::is_sorted(centers.begin(), centers.end()));
}

TEST_CASE("a 440 Hz sine peaks in the band whose center is nearest 440") {
  SpectralConfig cfg;
  const AudioBuffer audio = Sine(440.0, 1.0);
  const Matrix mel = intonate::mel_spectrogram(audio, cfg);

  // Centers re-derived from the mel-scale definition, not the library.
  std::vector<double> centers(cfg.mel_bands);
  const double mel_hi = 2595.0 * std::log10(1.0 + cfg.fmax / 700.0);
  for (int m = 0; m < cfg.mel_bands; ++m) {
    centers[m] =
        700.0 * (std::pow(10.0, mel_hi * (m + 1) / (cfg.mel_bands + 1) / 2595.0) - 1.0);
  }
  int nearest = 0;
  for (int m = 1; m < cfg.mel_bands; ++m) {
    if (std::abs(centers[m] - 440.0) < std::abs(centers[nearest] - 440.0)) nearest = m;
  }

  const int mid = mel.rows() / 2;
  int argmax = 0;
  for (int m = 1; m < mel.cols(); ++m) {
    if (mel(mid, m) > mel(mid, argmax)) argmax = m;
  }
  CHECK(argmax == nearest);
}

TEST_CASE("exactly one frame from a frame-length signal") {
  SpectralConfig cfg;
  AudioBuffer audio = Sine(440.0, 1.0);
  audio.samples.resize(1024);
  const Matrix mel = intonate::mel_spectrogram(audio, cfg);
  CHECK(mel.rows() == 1);
}

TEST_CASE("silence hits the log floor in every bin") {
  SpectralConfig cfg;
  AudioBuffer silence;
  silence.sample_rate = 22050;
  silence.samples.assign(4096, 0.0f);
  const Matrix mel = intonate::mel_spectrogram(silence, cfg);
  const double floor_value = std::log(1e-10);
  for (int t = 0; t < mel.rows(); ++t) {
    for (int m = 0; m < mel.cols(); ++m) {
      CHECK(mel(t, m) == doctest::Approx(floor_value).epsilon(1e-12));
    }
  }
}

TEST_CASE("scaling the signal shifts unfloored log-mel bins by 2 ln g") {
  SpectralConfig cfg;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  AudioBuffer audio;
  audio.sample_rate = 22050;
  audio.samples.resize(4096);
  for (float& s : audio.samples) s = static_cast<float>(dist(rng));

  AudioBuffer scaled = audio;
  for (float& s : scaled.samples) s *= 2.0f;

  const Matrix a = intonate::mel_spectrogram(audio, cfg);
  const Matrix b = intonate::mel_spectrogram(scaled, cfg);
  const double shift = 2.0 * std::log(2.0);
  const double floor_value = std::log(1e-10);
  int compared = 0;
  for (int t = 0; t < a.rows(); ++t) {
    for (int m = 0; m < a.cols(); ++m) {
      if (a(t, m) > floor_value + 1.0 && b(t, m) > floor_value + 1.0) {
        CHECK(b(t, m) - a(t, m) == doctest::Approx(shift).epsilon(1e-9));
        ++compared;
      }
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("mel_cepstra matches the direct dct-ii") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  Matrix log_mel(4, 8);
  for (double& v : log_mel.data()) v = dist(rng);

  const MelCepstra cep = intonate::mel_cepstra(log_mel, 8);
  for (int t = 0; t < 4; ++t) {
    std::vector<double> x(log_mel.row(t).begin(), log_mel.row(t).end());
    CHECK(cep.c0[t] == doctest::Approx(BruteForceDct(x, 0)).epsilon(1e-9));
    for (int k = 1; k <= 8; ++k) {
      CHECK(cep.coeffs(t, k - 1) == doctest::Approx(BruteForceDct(x, k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("constant log-mel rows put all energy into c0") {
  Matrix log_mel(2, 16, 3.5);
  const MelCepstra cep = intonate::mel_cepstra(log_mel, 12);
  for (int t = 0; t < 2; ++t) {
    CHECK(cep.c0[t] == doctest::Approx(3.5 * std::sqrt(16.0)).epsilon(1e-12));
    for (int k = 0; k < 12; ++k) {
      CHECK(std::abs(cep.coeffs(t, k)) < 1e-12);
    }
  }
}

TEST_CASE("identical frames produce identical cepstra rows") {
  Matrix log_mel(2, 8);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int m = 0; m < 8; ++m) {
    const double v = dist(rng);
    log_mel(0, m) = v;
    log_mel(1, m) = v;
  }
  const MelCepstra cep = intonate::mel_cepstra(log_mel, 5);
  for (int k = 0; k < 5; ++k) CHECK(cep.coeffs(0, k) == cep.coeffs(1, k));
}

TEST_CASE("config validation rejects inconsistent settings") {
  SpectralConfig cfg;
  CHECK_NOTHROW(cfg.validate(22050));
  SUBCASE("hop larger than frame") {
    cfg.hop_length = 2048;
    CHECK_THROWS_AS(cfg.validate(22050), std::invalid_argument);
  }
  SUBCASE("fft not a power of two") {
    cfg.fft_size = 1000;
    cfg.frame_length = 1000;
    CHECK_THROWS_AS(cfg.validate(22050), std::invalid_argument);
  }
  SUBCASE("fmax above nyquist") {
    cfg.fmax = 20000.0;
    CHECK_THROWS_AS(cfg.validate(22050), std::invalid_argument);
  }
  SUBCASE("cepstral order above band count") {
    cfg.cepstral_order = 81;
    CHECK_THROWS_AS(cfg.validate(22050), std::invalid_argument);
  }
}

TEST_CASE("raw matrix dump round trips with its sidecar") {
  testutil::TempDir tmp;
  Matrix m(3, 5);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : m.data()) v = dist(rng);
  const auto path = tmp.file("feat.bin");
  intonate::write_matrix_raw(path, m);
  CHECK(std::filesystem::exists(tmp.file("feat.bin.json")));
  const Matrix back = intonate::read_matrix_raw(path);
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 5);
  CHECK(back.data() == m.data());
}

}  // TEST_SUITE("signal")
