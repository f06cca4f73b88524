// core/src/metrics.cpp

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

#include "intonate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "intonate/align.hpp"
#include "json.hpp"

namespace intonate {

namespace {

double Median(std::vector<double> values) {
  const size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

FfeBreakdown ffe_report(const PitchTrack& ref, const PitchTrack& hyp,
                        double deviation_tol) {
  if (ref.frames() != hyp.frames()) {
    throw std::invalid_argument("ffe_report: frame counts differ");
  }
  const int n = ref.frames();
  if (n == 0) throw std::invalid_argument("ffe_report: empty tracks");

  int voicing_errors = 0;
  int gross_errors = 0;
  for (int i = 0; i < n; ++i) {
    const bool rv = ref.voiced[i] != 0;
    const bool hv = hyp.voiced[i] != 0;
    if (rv != hv) {
      ++voicing_errors;
    } else if (rv && hv) {
      if (std::abs(hyp.f0[i] - ref.f0[i]) / ref.f0[i] > deviation_tol) ++gross_errors;
    }
  }

  FfeBreakdown out;
  out.frames = n;
  out.vde = static_cast<double>(voicing_errors) / n;
  out.gpe = static_cast<double>(gross_errors) / n;
  out.ffe = out.vde + out.gpe;
  return out;
}

std::string_view to_string(RiseVerdict verdict) {
  switch (verdict) {
    case RiseVerdict::kNotRising: return "not_rising";
    case RiseVerdict::kRising: return "rising";
    case RiseVerdict::kUndecidable: return "undecidable";
  }
  return "undecidable";
}

RiseResult detect_rising(const PitchTrack& track, const RiseConfig& cfg) {
  if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 0.5)) {
    throw std::invalid_argument("tail_fraction must lie in (0, 0.5]");
  }
  if (!(cfg.rise_ratio_threshold > 1.0)) {
    throw std::invalid_argument("rise_ratio_threshold must exceed 1");
  }
  const int n = track.frames();
  const int tail_frames =
      std::max<int>(1, static_cast<int>(std::llround(cfg.tail_fraction * n)));
  const int tail_start = n - tail_frames;

  std::vector<double> head, tail;
  for (int i = 0; i < n; ++i) {
    if (!track.voiced[i]) continue;
    (i < tail_start ? head : tail).push_back(track.f0[i]);
  }

  RiseResult result;
  if (static_cast<int>(head.size()) < cfg.min_voiced_tail ||
      static_cast<int>(tail.size()) < cfg.min_voiced_tail) {
    result.verdict = RiseVerdict::kUndecidable;
    result.rise_ratio = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  result.rise_ratio = Median(std::move(tail)) / Median(std::move(head));
  result.verdict = result.rise_ratio > cfg.rise_ratio_threshold
                       ? RiseVerdict::kRising
                       : RiseVerdict::kNotRising;
  return result;
}

double PerceptionAccuracy::overall() const {
  std::size_t c = 0, t = 0;
  for (int i = 0; i < kNumSentenceTypes; ++i) {
    c += correct[i];
    t += total[i];
  }
  return t == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(t);
}

PerceptionAccuracy perception_accuracy(
    std::span<const std::pair<SentenceType, SentenceType>> predicted_and_true) {
  if (predicted_and_true.empty()) {
    throw std::invalid_argument("perception_accuracy: empty input");
  }
  PerceptionAccuracy acc;
  for (const auto& [predicted, truth] : predicted_and_true) {
    if (truth == SentenceType::kNormalQuestion) {
      throw std::invalid_argument(
          "perception_accuracy: protocol admits only statements and "
          "declarative questions");
    }
    const int c = static_cast<int>(truth);
    ++acc.total[c];
    if (predicted == truth) ++acc.correct[c];
  }
  return acc;
}

MetricReport evaluate_pair(const AudioBuffer& ref, const AudioBuffer& hyp,
                           const EvalConfig& cfg) {
  const MelCepstra ref_cep = compute_cepstra(ref, cfg.spectral);
  const MelCepstra hyp_cep = compute_cepstra(hyp, cfg.spectral);
  const AlignmentPath path = dtw(ref_cep, hyp_cep);
  const std::vector<int> mapping = map_frames(path);

  PitchConfig pitch_cfg = cfg.pitch;
  pitch_cfg.frame_length = cfg.spectral.frame_length;
  pitch_cfg.hop_length = cfg.spectral.hop_length;
  const PitchTrack ref_track = extract_f0(ref, pitch_cfg);
  const PitchTrack hyp_track = extract_f0(hyp, pitch_cfg);

  // Pull the aligned hyp frame onto each ref frame.
  PitchTrack hyp_mapped;
  hyp_mapped.hop_seconds = hyp_track.hop_seconds;
  hyp_mapped.f0.resize(mapping.size());
  hyp_mapped.voiced.resize(mapping.size());
  for (size_t i = 0; i < mapping.size(); ++i) {
    hyp_mapped.f0[i] = hyp_track.f0[mapping[i]];
    hyp_mapped.voiced[i] = hyp_track.voiced[mapping[i]];
  }

  const FfeBreakdown ffe = ffe_report(ref_track, hyp_mapped, cfg.deviation_tol);

  MetricReport report;
  report.ffe = ffe.ffe;
  report.gpe = ffe.gpe;
  report.vde = ffe.vde;
  report.frames = ffe.frames;
  report.mean_mcd = path.mean_cost();
  report.rising_ref = detect_rising(ref_track, cfg.rise);
  report.rising_hyp = detect_rising(hyp_track, cfg.rise);
  return report;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::json j;
  j["ffe"] = report.ffe;
  j["gpe"] = report.gpe;
  j["vde"] = report.vde;
  j["mean_mcd"] = report.mean_mcd;
  j["frames"] = report.frames;
  j["rising_ref"] = std::string(to_string(report.rising_ref.verdict));
  j["rising_hyp"] = std::string(to_string(report.rising_hyp.verdict));
  j["rise_ratio_ref"] = report.rising_ref.rise_ratio;
  j["rise_ratio_hyp"] = report.rising_hyp.rise_ratio;
  return j.dump(2);
}

}  // namespace intonate
