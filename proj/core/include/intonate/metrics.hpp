// core/include/intonate/metrics.hpp

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

#ifndef INTONATE_METRICS_HPP_
#define INTONATE_METRICS_HPP_

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "intonate/audio.hpp"
#include "intonate/corpus.hpp"
#include "intonate/pitch.hpp"
#include "intonate/signal.hpp"

namespace intonate {

// Frame-level pitch errors over two tracks of equal length:
//   vde: voicing decisions that disagree
//   gpe: frames voiced in both where hyp deviates from ref by more than
//        deviation_tol (relative)
//   ffe = vde + gpe, both rates taken over all frames so the identity is
//        exact by construction
struct FfeBreakdown {
  double ffe = 0.0;
  double gpe = 0.0;
  double vde = 0.0;
  int frames = 0;
};

FfeBreakdown ffe_report(const PitchTrack& ref, const PitchTrack& hyp,
                        double deviation_tol = 0.20);

enum class RiseVerdict { kNotRising = 0, kRising = 1, kUndecidable = 2 };

std::string_view to_string(RiseVerdict verdict);

struct RiseConfig {
  double tail_fraction = 0.2;         // portion of frames forming the tail
  double rise_ratio_threshold = 1.10; // tail/head median ratio above which it rises
  int min_voiced_tail = 3;            // voiced frames required in tail and head
};

// rise_ratio = median(voiced f0 in tail) / median(voiced f0 before tail).
// Ratio of medians, so the verdict is unchanged by uniform pitch scaling
// and robust to isolated extraction glitches. Undecidable (rise_ratio NaN)
// when either region has fewer than min_voiced_tail voiced frames.
struct RiseResult {
  RiseVerdict verdict = RiseVerdict::kUndecidable;
  double rise_ratio = 0.0;

  bool is_rising() const { return verdict == RiseVerdict::kRising; }
};

RiseResult detect_rising(const PitchTrack& track, const RiseConfig& cfg = {});

// Accuracy of predicted sentence types against true labels for the
// statement / declarative-question listening protocol. Only those two
// classes may appear as true labels.
struct PerceptionAccuracy {
  std::array<std::size_t, kNumSentenceTypes> correct{};
  std::array<std::size_t, kNumSentenceTypes> total{};

  double class_accuracy(SentenceType t) const {
    const int c = static_cast<int>(t);
    return total[c] == 0 ? 0.0
                         : static_cast<double>(correct[c]) / static_cast<double>(total[c]);
  }
  double overall() const;
};

PerceptionAccuracy perception_accuracy(
    std::span<const std::pair<SentenceType, SentenceType>> predicted_and_true);

// Everything measured for one reference/hypothesis pair.
struct MetricReport {
  double ffe = 0.0;
  double gpe = 0.0;
  double vde = 0.0;
  double mean_mcd = 0.0;  // dB, total path cost / path length
  int frames = 0;         // ref frames compared
  RiseResult rising_ref;
  RiseResult rising_hyp;
};

struct EvalConfig {
  SpectralConfig spectral;
  PitchConfig pitch;
  RiseConfig rise;
  double deviation_tol = 0.20;
};

// Full objective pipeline: cepstra for both signals, DTW alignment in MCD
// space, hyp pitch mapped onto ref frames through the path, then FFE and
// rising detection on the unwarped tracks.
MetricReport evaluate_pair(const AudioBuffer& ref, const AudioBuffer& hyp,
                           const EvalConfig& cfg);

std::string report_to_json(const MetricReport& report);

}  // namespace intonate

#endif  // INTONATE_METRICS_HPP_
