// core/src/pitch.cpp

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

#include "intonate/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "intonate/signal.hpp"

namespace intonate {

namespace {

// Squared difference of the frame against itself shifted by each lag.
// The integration window is half the frame, so lags up to frame/2 stay
// inside the frame.
void DifferenceFunction(const float* frame, int window, int max_lag,
                        std::vector<double>& diff) {
  diff.assign(max_lag + 1, 0.0);
  for (int lag = 1; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (int j = 0; j < window; ++j) {
      const double d = static_cast<double>(frame[j]) - static_cast<double>(frame[j + lag]);
      acc += d * d;
    }
    diff[lag] = acc;
  }
}

// d'(lag) = d(lag) * lag / sum_{j<=lag} d(j); d'(0) = 1 by definition.
// Ratios of the raw differences cancel any amplitude scaling, which is
// what makes the voicing decision gain-invariant.
void CumulativeMeanNormalize(std::vector<double>& diff) {
  double running = 0.0;
  diff[0] = 1.0;
  for (size_t lag = 1; lag < diff.size(); ++lag) {
    running += diff[lag];
    diff[lag] = running > 0.0 ? diff[lag] * static_cast<double>(lag) / running : 1.0;
  }
}

// Parabolic refinement of the selected lag using its neighbors.
double RefineLag(const std::vector<double>& diff, int lag) {
  const int lo = lag > 1 ? lag - 1 : lag;
  const int hi = lag + 1 < static_cast<int>(diff.size()) ? lag + 1 : lag;
  if (lo == lag || hi == lag) return lag;
  const double s0 = diff[lo], s1 = diff[lag], s2 = diff[hi];
  const double denom = 2.0 * (2.0 * s1 - s2 - s0);
  if (denom == 0.0) return lag;
  return lag + (s2 - s0) / denom;
}

}  // namespace

PitchTrack extract_f0(const AudioBuffer& audio, const PitchConfig& cfg) {
  const double sr = audio.sample_rate;
  if (audio.sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");
  if (!(cfg.fmin_search > 0.0 && cfg.fmin_search < cfg.fmax_search &&
        cfg.fmax_search < sr / 2.0)) {
    throw std::invalid_argument("require 0 < fmin_search < fmax_search < sample_rate/2");
  }
  if (audio.samples.size() < static_cast<size_t>(2.0 * sr / cfg.fmin_search)) {
    throw std::runtime_error("signal shorter than two periods at fmin_search");
  }
  const int frames = frame_count(audio.samples.size(), cfg.frame_length, cfg.hop_length);

  const int window = cfg.frame_length / 2;
  const int min_lag = std::max(2, static_cast<int>(std::floor(sr / cfg.fmax_search)));
  const int max_lag = std::min(window, static_cast<int>(std::ceil(sr / cfg.fmin_search)));
  if (min_lag >= max_lag) {
    throw std::invalid_argument("search range leaves no usable lags at this frame length");
  }

  PitchTrack track;
  track.hop_seconds = cfg.hop_length / sr;
  track.f0.assign(frames, 0.0);
  track.voiced.assign(frames, 0);

  std::vector<double> diff;
  for (int t = 0; t < frames; ++t) {
    const float* frame = audio.samples.data() + static_cast<size_t>(t) * cfg.hop_length;
    DifferenceFunction(frame, window, max_lag, diff);
    CumulativeMeanNormalize(diff);

    // First lag below threshold, then walk down its dip: favoring the
    // earliest dip avoids locking onto period multiples (octave-down).
    int selected = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (diff[lag] < cfg.threshold) {
        while (lag + 1 <= max_lag && diff[lag + 1] < diff[lag]) ++lag;
        selected = lag;
        break;
      }
    }
    if (selected < 0) continue;

    const double refined = RefineLag(diff, selected);
    if (refined <= 0.0) continue;
    const double f0 = sr / refined;
    if (f0 < cfg.fmin_search || f0 > cfg.fmax_search) continue;  // clamp to unvoiced
    track.f0[t] = f0;
    track.voiced[t] = 1;
  }
  return track;
}

void write_pitch_csv(const std::filesystem::path& path, const PitchTrack& track) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "frame,time_s,f0_hz,voiced\n";
  char line[128];
  for (int i = 0; i < track.frames(); ++i) {
    std::snprintf(line, sizeof(line), "%d,%.6f,%.4f,%d\n", i, i * track.hop_seconds,
                  track.f0[i], track.voiced[i] ? 1 : 0);
    out << line;
  }
}

}  // namespace intonate
