// core/include/intonate/contour.hpp

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

#ifndef INTONATE_CONTOUR_HPP_
#define INTONATE_CONTOUR_HPP_

#include <cstddef>
#include <filesystem>
#include <vector>

#include "intonate/audio.hpp"
#include "intonate/corpus.hpp"
#include "intonate/pitch.hpp"

namespace intonate {

// Parameters of the rendered F0 contour: a declining baseline, and for
// declarative questions a multiplicative ramp over the final stretch that
// ends rise_ratio above the baseline. Multiplicative so the detector's
// tail/head ratio statistic is driven directly by rise_ratio.
struct ContourSpec {
  double base_f0 = 200.0;          // Hz at t = 0
  double declination = 0.0;        // Hz per second, typically <= 0
  double duration = 1.0;           // seconds
  double rise_onset_fraction = 0.8;
  double rise_ratio = 1.3;
  double jitter_std = 0.0;         // Hz, per-frame Gaussian jitter
  unsigned jitter_seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// F0 track for a sentence type: statements and normal questions share the
// plain declination line; declarative questions get the final rise. Frame
// count is round(duration / hop_seconds); every frame is voiced.
PitchTrack render_contour(const ContourSpec& spec, SentenceType type,
                          double hop_seconds);

// Phase-continuous harmonic tone following the track. Unvoiced frames
// render as silence. Harmonics that would cross Nyquist are dropped and
// counted into *dropped_harmonics. The rendered length is
// (frames-1)*hop + analysis_frame_length samples and each frame's f0 is
// placed at the center of the matching analysis window, so running
// extract_f0 with the same framing recovers the track frame for frame.
AudioBuffer tone_from_contour(const PitchTrack& track, int sample_rate,
                              int harmonics = 3, int analysis_frame_length = 1024,
                              std::size_t* dropped_harmonics = nullptr);

// Toy grammar for desk-scale experiments. Each drawn subject/verb/object
// combination yields the triple
//   statement            S V O 。
//   normal question      S V 不 V O ？
//   declarative question S V O ？
// so a declarative question differs from its statement twin only by the
// final punctuation mark.
struct SyntheticDatasetConfig {
  int n_per_class = 30;
  unsigned seed = 0;

  // contour/audio settings
  double base_f0_min = 180.0;
  double base_f0_max = 220.0;
  double declination = -5.0;   // Hz/s
  double rise_onset_fraction = 0.8;
  double rise_ratio = 1.3;
  double jitter_std = 0.0;
  double seconds_per_char = 0.1;
  double min_duration = 0.8;
  int sample_rate = 22050;
  int harmonics = 3;
  int frame_length = 1024;
  int hop_length = 256;
};

// Text and labels only; ids are <label>-<index>. Deterministic in seed.
std::vector<Utterance> make_synthetic_utterances(const SyntheticDatasetConfig& cfg);

// Text, labels and rendered audio. Writes wav/<id>.wav under out_dir plus
// a manifest.tsv, and returns the utterances with audio paths filled in.
std::vector<Utterance> make_synthetic_dataset(const SyntheticDatasetConfig& cfg,
                                              const std::filesystem::path& out_dir);

// The contour an utterance of this type and length would be rendered with;
// shared by make_synthetic_dataset and the say pipeline.
ContourSpec contour_for(const SyntheticDatasetConfig& cfg, double base_f0,
                        double duration, unsigned jitter_seed);

}  // namespace intonate

#endif  // INTONATE_CONTOUR_HPP_
