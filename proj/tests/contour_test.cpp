// tests/contour_test.cpp

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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "intonate/contour.hpp"
#include "intonate/metrics.hpp"
#include "intonate/pitch.hpp"
#include "intonate/text.hpp"
#include "test_util.hpp"

using intonate::AudioBuffer;
using intonate::ContourSpec;
using intonate::PitchTrack;
using intonate::SentenceType;
using intonate::SyntheticDatasetConfig;
using intonate::Utterance;

namespace {

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_SUITE("contour") {

TEST_CASE("a statement follows the declination line") {
  ContourSpec spec;
  spec.base_f0 = 200.0;
  spec.declination = -20.0;
  spec.duration = 1.0;
  const PitchTrack track = intonate::render_contour(spec, SentenceType::kStatement, 0.01);
  REQUIRE(track.frames() == 100);
  for (int i = 0; i < 100; ++i) {
    CHECK(track.voiced[i] == 1);
    CHECK(track.f0[i] == doctest::Approx(200.0 - 20.0 * (i * 0.01)).epsilon(1e-12));
  }
  CHECK(track.f0.back() == doctest::Approx(180.2).epsilon(1e-9));  // ~180 Hz at the end
}

TEST_CASE("normal questions share the statement shape") {
  ContourSpec spec;
  spec.base_f0 = 210.0;
  spec.declination = -15.0;
  const PitchTrack sta = intonate::render_contour(spec, SentenceType::kStatement, 0.01);
  const PitchTrack que = intonate::render_contour(spec, SentenceType::kNormalQuestion, 0.01);
  CHECK(sta.f0 == que.f0);
}

TEST_CASE("rise_ratio 1 collapses all three types onto one track") {
  ContourSpec spec;
  spec.rise_ratio = 1.0;
  spec.declination = -10.0;
  const PitchTrack sta = intonate::render_contour(spec, SentenceType::kStatement, 0.012);
  const PitchTrack que = intonate::render_contour(spec, SentenceType::kNormalQuestion, 0.012);
  const PitchTrack decq =
      intonate::render_contour(spec, SentenceType::kDeclarativeQuestion, 0.012);
  CHECK(sta.f0 == que.f0);
  CHECK(sta.f0 == decq.f0);
}

TEST_CASE("frame count is round(duration / hop)") {
  ContourSpec spec;
  for (const double duration : {0.5, 0.77, 1.0, 1.23}) {
    for (const double hop : {0.01, 0.0116, 0.02}) {
      spec.duration = duration;
      const PitchTrack track =
          intonate::render_contour(spec, SentenceType::kStatement, hop);
      CHECK(track.frames() ==
            std::max<int>(1, static_cast<int>(std::llround(duration / hop))));
    }
  }
}

TEST_CASE("the declarative rise is seen by the detector") {
  ContourSpec spec;
  spec.base_f0 = 200.0;
  spec.declination = 0.0;
  spec.duration = 1.0;
  spec.rise_ratio = 1.3;
  const PitchTrack track =
      intonate::render_contour(spec, SentenceType::kDeclarativeQuestion, 0.01);

  const intonate::RiseResult result = intonate::detect_rising(track);
  CHECK(result.verdict == intonate::RiseVerdict::kRising);

  // The detector's statistic must equal medians taken directly off the
  // rendered frames.
  std::vector<double> head(track.f0.begin(), track.f0.begin() + 80);
  std::vector<double> tail(track.f0.begin() + 80, track.f0.end());
  CHECK(result.rise_ratio ==
        doctest::Approx(Median(tail) / Median(head)).epsilon(1e-12));
  CHECK(result.rise_ratio > 1.10);
  CHECK(result.rise_ratio < 1.3);  // the ramp only reaches 1.3 at the last frame
}

TEST_CASE("jitter is reproducible by seed") {
  ContourSpec spec;
  spec.jitter_std = 5.0;
  spec.jitter_seed = 99;
  const PitchTrack a = intonate::render_contour(spec, SentenceType::kStatement, 0.01);
  const PitchTrack b = intonate::render_contour(spec, SentenceType::kStatement, 0.01);
  CHECK(a.f0 == b.f0);

  spec.jitter_seed = 100;
  const PitchTrack c = intonate::render_contour(spec, SentenceType::kStatement, 0.01);
  CHECK(a.f0 != c.f0);
}

TEST_CASE("contour specs are validated") {
  ContourSpec spec;
  spec.base_f0 = -1.0;
  CHECK_THROWS_AS(intonate::render_contour(spec, SentenceType::kStatement, 0.01),
                  std::invalid_argument);
  spec = ContourSpec{};
  spec.rise_onset_fraction = 1.0;
  CHECK_THROWS_AS(intonate::render_contour(spec, SentenceType::kStatement, 0.01),
                  std::invalid_argument);
  spec = ContourSpec{};
  spec.rise_ratio = 0.9;
  CHECK_THROWS_AS(intonate::render_contour(spec, SentenceType::kStatement, 0.01),
                  std::invalid_argument);
}

TEST_CASE("a flat tone round trips through the pitch extractor") {
  PitchTrack track;
  track.hop_seconds = 256.0 / 22050.0;
  track.f0.assign(90, 220.0);
  track.voiced.assign(90, 1);
  const AudioBuffer audio = intonate::tone_from_contour(track, 22050, 3, 1024);

  intonate::PitchConfig cfg;
  const PitchTrack measured = intonate::extract_f0(audio, cfg);
  REQUIRE(measured.frames() == 90);
  std::vector<double> voiced;
  for (int i = 0; i < measured.frames(); ++i) {
    if (measured.voiced[i]) voiced.push_back(measured.f0[i]);
  }
  REQUIRE(static_cast<int>(voiced.size()) > 80);
  CHECK(Median(voiced) == doctest::Approx(220.0).epsilon(0.01));
}

TEST_CASE("an unvoiced track renders as silence") {
  PitchTrack track;
  track.hop_seconds = 0.0116;
  track.f0.assign(50, 0.0);
  track.voiced.assign(50, 0);
  const AudioBuffer audio = intonate::tone_from_contour(track, 22050, 3, 1024);
  for (const float s : audio.samples) CHECK(s == 0.0f);
}

TEST_CASE("harmonics above nyquist are dropped and counted") {
  PitchTrack track;
  track.hop_seconds = 256.0 / 22050.0;
  track.f0.assign(90, 4000.0);  // 3rd harmonic at 12 kHz > 11025
  track.voiced.assign(90, 1);
  std::size_t dropped = 0;
  const AudioBuffer audio = intonate::tone_from_contour(track, 22050, 3, 1024, &dropped);
  CHECK(dropped == 90);  // one dropped harmonic per frame
  CHECK(audio.samples.size() == 89 * 256 + 1024);
}

TEST_CASE("rendered contours round trip within 3 percent on interior frames") {
  const double hop = 256.0 / 22050.0;
  for (const double base : {100.0, 180.0, 300.0, 400.0}) {
    ContourSpec spec;
    spec.base_f0 = base;
    spec.declination = -5.0;
    spec.duration = 1.0;
    const PitchTrack track =
        intonate::render_contour(spec, SentenceType::kDeclarativeQuestion, hop);
    const AudioBuffer audio = intonate::tone_from_contour(track, 22050, 3, 1024);
    const PitchTrack measured = intonate::extract_f0(audio, intonate::PitchConfig{});
    REQUIRE(measured.frames() == track.frames());
    for (int i = 3; i < measured.frames() - 3; ++i) {
      REQUIRE(measured.voiced[i] == 1);
      CHECK(measured.f0[i] == doctest::Approx(track.f0[i]).epsilon(0.03));
    }
  }
}

TEST_CASE("the toy grammar emits balanced matched triples") {
  SyntheticDatasetConfig cfg;
  cfg.n_per_class = 10;
  const std::vector<Utterance> utts = intonate::make_synthetic_utterances(cfg);
  REQUIRE(utts.size() == 30);
  const intonate::CorpusStats stats = intonate::corpus_stats(utts);
  for (int c = 0; c < 3; ++c) CHECK(stats.counts[c] == 10);

  std::set<std::string> ids;
  for (const Utterance& utt : utts) CHECK(ids.insert(utt.id).second);

  // Declarative questions differ from their statement twins only in the
  // final mark; normal questions carry the A-not-A particle pattern.
  for (size_t i = 0; i + 2 < utts.size(); i += 3) {
    const Utterance& sta = utts[i];
    const Utterance& que = utts[i + 1];
    const Utterance& decq = utts[i + 2];
    CHECK(sta.label == SentenceType::kStatement);
    CHECK(que.label == SentenceType::kNormalQuestion);
    CHECK(decq.label == SentenceType::kDeclarativeQuestion);
    CHECK(intonate::strip_trailing_punctuation(decq.text) ==
          intonate::strip_trailing_punctuation(sta.text));
    CHECK(que.text.find("不") != std::string::npos);
    CHECK(decq.text.find("不") == std::string::npos);
  }

  // Same seed, same corpus; different seed, different draw.
  const auto again = intonate::make_synthetic_utterances(cfg);
  CHECK(again == utts);
  cfg.seed = 1;
  const auto other = intonate::make_synthetic_utterances(cfg);
  CHECK(other != utts);
}

TEST_CASE("the synthetic dataset writes decodable audio with the right intonation") {
  testutil::TempDir tmp;
  SyntheticDatasetConfig cfg;
  cfg.n_per_class = 3;
  const std::vector<Utterance> utts = intonate::make_synthetic_dataset(cfg, tmp.path());

  const auto parsed = intonate::parse_manifest(tmp.file("manifest.tsv"));
  CHECK(parsed == utts);

  intonate::PitchConfig pitch_cfg;
  pitch_cfg.frame_length = cfg.frame_length;
  pitch_cfg.hop_length = cfg.hop_length;
  for (const Utterance& utt : utts) {
    const AudioBuffer audio = intonate::load_wav(tmp.path() / utt.audio_path);
    CHECK(audio.sample_rate == cfg.sample_rate);
    const PitchTrack track = intonate::extract_f0(audio, pitch_cfg);
    const intonate::RiseResult rise = intonate::detect_rising(track);
    if (utt.label == SentenceType::kDeclarativeQuestion) {
      CHECK(rise.verdict == intonate::RiseVerdict::kRising);
    } else {
      CHECK(rise.verdict == intonate::RiseVerdict::kNotRising);
    }
  }
}

TEST_CASE("synthetic generation rejects a zero class size") {
  SyntheticDatasetConfig cfg;
  cfg.n_per_class = 0;
  CHECK_THROWS_AS(intonate::make_synthetic_utterances(cfg), std::invalid_argument);
}

}  // TEST_SUITE("contour")
