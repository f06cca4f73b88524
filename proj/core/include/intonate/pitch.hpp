// core/include/intonate/pitch.hpp

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

#ifndef INTONATE_PITCH_HPP_
#define INTONATE_PITCH_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "intonate/audio.hpp"

namespace intonate {

// F0 track on the analysis hop grid. Frame i covers the same samples as
// spectral frame i, so pitch rows pair one-to-one with cepstra rows.
// Invariant: f0[i] > 0 exactly when voiced[i] != 0.
struct PitchTrack {
  double hop_seconds = 0.0;
  std::vector<double> f0;            // Hz, 0 where unvoiced
  std::vector<std::uint8_t> voiced;  // 0 / 1

  int frames() const { return static_cast<int>(f0.size()); }
};

struct PitchConfig {
  double fmin_search = 60.0;   // Hz
  double fmax_search = 500.0;  // Hz
  double threshold = 0.15;     // normalized-difference voicing threshold
  int frame_length = 1024;     // match the spectral front-end
  int hop_length = 256;
};

// Per-frame pitch via the cumulative-mean-normalized difference function.
// A frame is voiced when the normalized difference dips below
// cfg.threshold inside the lag range implied by [fmin_search, fmax_search];
// the first dip is refined with parabolic interpolation. Estimates that
// land outside the search range are clamped to unvoiced. Throws when the
// signal is shorter than one frame or than two periods at fmin_search.
PitchTrack extract_f0(const AudioBuffer& audio, const PitchConfig& cfg);

// CSV lines: frame,time_s,f0_hz,voiced (header included).
void write_pitch_csv(const std::filesystem::path& path, const PitchTrack& track);

}  // namespace intonate

#endif  // INTONATE_PITCH_HPP_
