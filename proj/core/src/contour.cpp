// core/src/contour.cpp

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

#include "intonate/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "intonate/text.hpp"

namespace intonate {

namespace {

// Portable uniform double in [0, 1) from the raw engine output.
double Uniform01(std::mt19937& rng) {
  return static_cast<double>(rng()) / 4294967296.0;
}

// Box-Muller, one value per call; keeps jitter independent of the standard
// library's normal_distribution implementation.
double Gaussian(std::mt19937& rng) {
  double u1 = Uniform01(rng);
  if (u1 <= 0.0) u1 = 1e-12;
  const double u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

const std::vector<std::string>& Subjects() {
  static const std::vector<std::string> kWords = {"他", "她", "我", "你",
                                                  "老师", "妈妈", "哥哥", "朋友"};
  return kWords;
}

const std::vector<std::string>& Verbs() {
  static const std::vector<std::string> kWords = {"去", "看", "买", "吃",
                                                  "喝", "学", "写", "读"};
  return kWords;
}

const std::vector<std::string>& Objects() {
  static const std::vector<std::string> kWords = {"学校", "电影", "苹果", "米饭",
                                                  "咖啡", "中文", "汉字", "报纸"};
  return kWords;
}

std::string MakeId(SentenceType type, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%04d", std::string(to_label(type)).c_str(), index);
  return buf;
}

}  // namespace

void ContourSpec::validate() const {
  if (!(base_f0 > 0.0)) throw std::invalid_argument("base_f0 must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(rise_onset_fraction > 0.0 && rise_onset_fraction < 1.0)) {
    throw std::invalid_argument("rise_onset_fraction must lie in (0,1)");
  }
  if (!(rise_ratio >= 1.0)) throw std::invalid_argument("rise_ratio must be >= 1");
  if (jitter_std < 0.0) throw std::invalid_argument("jitter_std must be >= 0");
}

PitchTrack render_contour(const ContourSpec& spec, SentenceType type,
                          double hop_seconds) {
  spec.validate();
  if (!(hop_seconds > 0.0)) throw std::invalid_argument("hop_seconds must be positive");
  const int frames = std::max<int>(1, static_cast<int>(std::llround(spec.duration / hop_seconds)));

  PitchTrack track;
  track.hop_seconds = hop_seconds;
  track.f0.resize(frames);
  track.voiced.assign(frames, 1);

  std::mt19937 jitter_rng(spec.jitter_seed);
  const bool rising = type == SentenceType::kDeclarativeQuestion;
  for (int i = 0; i < frames; ++i) {
    const double t = i * hop_seconds;
    double f0 = spec.base_f0 + spec.declination * t;
    if (rising) {
      const double pos = frames > 1 ? static_cast<double>(i) / (frames - 1) : 1.0;
      if (pos >= spec.rise_onset_fraction) {
        const double ramp = (pos - spec.rise_onset_fraction) /
                            (1.0 - spec.rise_onset_fraction);
        f0 *= 1.0 + (spec.rise_ratio - 1.0) * ramp;
      }
    }
    if (spec.jitter_std > 0.0) f0 += spec.jitter_std * Gaussian(jitter_rng);
    track.f0[i] = std::max(f0, 1.0);
  }
  return track;
}

AudioBuffer tone_from_contour(const PitchTrack& track, int sample_rate,
                              int harmonics, int analysis_frame_length,
                              std::size_t* dropped_harmonics) {
  if (track.frames() == 0) throw std::invalid_argument("tone_from_contour: empty track");
  if (sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");
  if (harmonics < 1) throw std::invalid_argument("harmonics must be >= 1");
  if (analysis_frame_length <= 0) {
    throw std::invalid_argument("analysis_frame_length must be positive");
  }
  const int frames = track.frames();
  const int hop = static_cast<int>(std::llround(track.hop_seconds * sample_rate));
  if (hop <= 0) throw std::invalid_argument("hop too small for this sample rate");

  AudioBuffer audio;
  audio.sample_rate = sample_rate;
  audio.samples.assign(static_cast<size_t>(frames - 1) * hop + analysis_frame_length, 0.0f);

  // 1/h harmonic amplitudes, normalized so the waveform peaks near 0.6.
  double amp_norm = 0.0;
  for (int h = 1; h <= harmonics; ++h) amp_norm += 1.0 / h;
  const double gain = 0.6 / amp_norm;

  const double nyquist = sample_rate / 2.0;
  std::size_t dropped = 0;
  // Count dropped harmonics once per (frame, harmonic).
  for (int i = 0; i < frames; ++i) {
    if (!track.voiced[i]) continue;
    for (int h = 1; h <= harmonics; ++h) {
      if (h * track.f0[i] >= nyquist) ++dropped;
    }
  }
  if (dropped_harmonics != nullptr) *dropped_harmonics = dropped;

  const double half_window = analysis_frame_length / 2.0;
  double phase = 0.0;
  for (size_t s = 0; s < audio.samples.size(); ++s) {
    // Frame whose analysis window is centered nearest this sample, so the
    // synthesized frequency at each window center equals the track value.
    int frame = static_cast<int>(
        std::floor((static_cast<double>(s) - half_window) / hop + 0.5));
    frame = std::clamp(frame, 0, frames - 1);
    if (!track.voiced[frame]) continue;  // silence, phase holds

    const double f0 = track.f0[frame];
    phase += 2.0 * std::numbers::pi * f0 / sample_rate;
    if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    double sample = 0.0;
    for (int h = 1; h <= harmonics; ++h) {
      if (h * f0 >= nyquist) break;
      sample += gain / h * std::sin(h * phase);
    }
    audio.samples[s] = static_cast<float>(sample);
  }
  return audio;
}

ContourSpec contour_for(const SyntheticDatasetConfig& cfg, double base_f0,
                        double duration, unsigned jitter_seed) {
  ContourSpec spec;
  spec.base_f0 = base_f0;
  spec.declination = cfg.declination;
  spec.duration = duration;
  spec.rise_onset_fraction = cfg.rise_onset_fraction;
  spec.rise_ratio = cfg.rise_ratio;
  spec.jitter_std = cfg.jitter_std;
  spec.jitter_seed = jitter_seed;
  return spec;
}

std::vector<Utterance> make_synthetic_utterances(const SyntheticDatasetConfig& cfg) {
  if (cfg.n_per_class <= 0) throw std::invalid_argument("n_per_class must be positive");
  const auto& subjects = Subjects();
  const auto& verbs = Verbs();
  const auto& objects = Objects();
  const int combos = static_cast<int>(subjects.size() * verbs.size() * objects.size());
  if (cfg.n_per_class > combos) {
    throw std::invalid_argument("n_per_class exceeds the toy grammar (" +
                                std::to_string(combos) + " combinations)");
  }

  // Draw distinct combinations; each one yields all three sentence types.
  std::vector<int> pool(combos);
  for (int i = 0; i < combos; ++i) pool[i] = i;
  std::mt19937 rng(cfg.seed);
  for (int i = combos - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<unsigned>(i + 1));
    std::swap(pool[i], pool[j]);
  }

  std::vector<Utterance> out;
  out.reserve(static_cast<size_t>(cfg.n_per_class) * 3);
  for (int n = 0; n < cfg.n_per_class; ++n) {
    const int combo = pool[n];
    const std::string& subj = subjects[combo % subjects.size()];
    const std::string& verb = verbs[(combo / subjects.size()) % verbs.size()];
    const std::string& obj = objects[combo / (subjects.size() * verbs.size())];
    const std::string core = subj + verb + obj;

    out.push_back({MakeId(SentenceType::kStatement, n), core + "。",
                   SentenceType::kStatement, ""});
    out.push_back({MakeId(SentenceType::kNormalQuestion, n), subj + verb + "不" + verb + obj + "？",
                   SentenceType::kNormalQuestion, ""});
    out.push_back({MakeId(SentenceType::kDeclarativeQuestion, n), core + "？",
                   SentenceType::kDeclarativeQuestion, ""});
  }
  return out;
}

std::vector<Utterance> make_synthetic_dataset(const SyntheticDatasetConfig& cfg,
                                              const std::filesystem::path& out_dir) {
  std::vector<Utterance> utterances = make_synthetic_utterances(cfg);
  const std::filesystem::path wav_dir = out_dir / "wav";
  std::filesystem::create_directories(wav_dir);

  const double hop_seconds = static_cast<double>(cfg.hop_length) / cfg.sample_rate;
  std::mt19937 rng(cfg.seed + 0x9e3779b9u);  // decoupled from the text draw
  for (Utterance& utt : utterances) {
    const double base_f0 =
        cfg.base_f0_min + (cfg.base_f0_max - cfg.base_f0_min) * Uniform01(rng);
    const auto chars = static_cast<double>(utf8_chars(utt.text).size());
    const double duration = std::max(cfg.min_duration, cfg.seconds_per_char * chars);
    const unsigned jitter_seed = rng();

    const ContourSpec spec = contour_for(cfg, base_f0, duration, jitter_seed);
    const PitchTrack track = render_contour(spec, utt.label, hop_seconds);
    const AudioBuffer audio =
        tone_from_contour(track, cfg.sample_rate, cfg.harmonics, cfg.frame_length);

    const std::filesystem::path wav_path = wav_dir / (utt.id + ".wav");
    save_wav(wav_path, audio);
    utt.audio_path = std::filesystem::relative(wav_path, out_dir).string();
  }
  write_manifest(out_dir / "manifest.tsv", utterances);
  return utterances;
}

}  // namespace intonate
