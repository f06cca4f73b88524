// tools/intonate_main.cpp

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

// Command line front end. Exit codes: 0 success, 1 usage error, 2 data or
// computation error. Every command that emits JSON embeds its effective
// configuration so runs are self-describing.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "intonate/align.hpp"
#include "intonate/audio.hpp"
#include "intonate/classifier.hpp"
#include "intonate/contour.hpp"
#include "intonate/corpus.hpp"
#include "intonate/metrics.hpp"
#include "intonate/pitch.hpp"
#include "intonate/signal.hpp"
#include "intonate/text.hpp"

namespace {

using intonate::AudioBuffer;
using intonate::ClassifierParams;
using intonate::ContourSpec;
using intonate::EvalConfig;
using intonate::LabeledText;
using intonate::Matrix;
using intonate::MetricReport;
using intonate::PitchConfig;
using intonate::PitchTrack;
using intonate::RiseConfig;
using intonate::SentenceType;
using intonate::SyntheticDatasetConfig;
using intonate::TrainConfig;
using intonate::Utterance;

std::string FormatDouble(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void WriteTextFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

nlohmann::json SpectralConfigJson(const intonate::SpectralConfig& cfg) {
  return {{"frame_length", cfg.frame_length}, {"hop_length", cfg.hop_length},
          {"fft_size", cfg.fft_size},         {"mel_bands", cfg.mel_bands},
          {"fmin", cfg.fmin},                 {"fmax", cfg.fmax},
          {"cepstral_order", cfg.cepstral_order}};
}

nlohmann::json PitchConfigJson(const PitchConfig& cfg) {
  return {{"fmin_search", cfg.fmin_search},
          {"fmax_search", cfg.fmax_search},
          {"threshold", cfg.threshold},
          {"frame_length", cfg.frame_length},
          {"hop_length", cfg.hop_length}};
}

nlohmann::json RiseConfigJson(const RiseConfig& cfg) {
  return {{"tail_fraction", cfg.tail_fraction},
          {"rise_ratio_threshold", cfg.rise_ratio_threshold},
          {"min_voiced_tail", cfg.min_voiced_tail}};
}

void AddSpectralFlags(CLI::App* cmd, intonate::SpectralConfig& cfg) {
  cmd->add_option("--frame-length", cfg.frame_length, "Analysis frame length, samples");
  cmd->add_option("--hop-length", cfg.hop_length, "Hop between frames, samples");
  cmd->add_option("--fft-size", cfg.fft_size, "FFT size (power of two)");
  cmd->add_option("--mel-bands", cfg.mel_bands, "Number of mel filters");
  cmd->add_option("--fmin", cfg.fmin, "Mel filterbank lower edge, Hz");
  cmd->add_option("--fmax", cfg.fmax, "Mel filterbank upper edge, Hz");
  cmd->add_option("--cepstral-order", cfg.cepstral_order, "Cepstral coefficients kept");
}

void AddPitchFlags(CLI::App* cmd, PitchConfig& cfg) {
  cmd->add_option("--f0-min", cfg.fmin_search, "Pitch search floor, Hz");
  cmd->add_option("--f0-max", cfg.fmax_search, "Pitch search ceiling, Hz");
  cmd->add_option("--yin-threshold", cfg.threshold, "Voicing threshold on the normalized difference");
}

void AddRiseFlags(CLI::App* cmd, RiseConfig& cfg) {
  cmd->add_option("--tail-fraction", cfg.tail_fraction, "Final fraction of frames treated as the tail");
  cmd->add_option("--rise-threshold", cfg.rise_ratio_threshold, "Tail/head median ratio that counts as rising");
  cmd->add_option("--min-voiced-tail", cfg.min_voiced_tail, "Voiced frames required in tail and head");
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string manifest;
  std::string ref_dir;
  std::string hyp_dir;
  std::string out_csv = "eval_batch.csv";
  std::string out_json = "eval_summary.json";
  int jobs = 1;
  EvalConfig cfg;
};

struct ClassMean {
  double ffe = 0.0, gpe = 0.0, vde = 0.0, mcd = 0.0;
  std::size_t count = 0;
};

void RunEval(const EvalOptions& opt) {
  std::vector<Utterance> utts = intonate::parse_manifest(opt.manifest);
  std::sort(utts.begin(), utts.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });

  // Resolve and verify every pair up front; a missing file must not leave
  // a partial summary behind.
  std::vector<std::filesystem::path> ref_paths, hyp_paths;
  for (const Utterance& utt : utts) {
    std::filesystem::path ref = std::filesystem::path(opt.ref_dir) / (utt.id + ".wav");
    std::filesystem::path hyp = std::filesystem::path(opt.hyp_dir) / (utt.id + ".wav");
    if (!std::filesystem::exists(ref)) {
      throw std::runtime_error("missing reference wav for id '" + utt.id + "': " + ref.string());
    }
    if (!std::filesystem::exists(hyp)) {
      throw std::runtime_error("missing hypothesis wav for id '" + utt.id + "': " + hyp.string());
    }
    ref_paths.push_back(std::move(ref));
    hyp_paths.push_back(std::move(hyp));
  }

  const size_t n = utts.size();
  std::vector<MetricReport> reports(n);
  const int jobs = std::clamp<int>(opt.jobs, 1, std::max<size_t>(n, 1));
  std::atomic<size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&]() {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= n) break;
      try {
        const AudioBuffer ref = intonate::load_wav(ref_paths[i]);
        const AudioBuffer hyp = intonate::load_wav(hyp_paths[i]);
        reports[i] = intonate::evaluate_pair(ref, hyp, opt.cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        cursor.store(n);
        break;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  // Batch CSV, rows already ordered by id.
  std::string csv = "id,class,ffe,gpe,vde,mean_mcd,rising_ref,rising_hyp\n";
  for (size_t i = 0; i < n; ++i) {
    const MetricReport& r = reports[i];
    csv += utts[i].id;
    csv += ',';
    csv += intonate::to_label(utts[i].label);
    csv += ',' + FormatDouble(r.ffe) + ',' + FormatDouble(r.gpe) + ',' + FormatDouble(r.vde) +
           ',' + FormatDouble(r.mean_mcd);
    csv += ',';
    csv += intonate::to_string(r.rising_ref.verdict);
    csv += ',';
    csv += intonate::to_string(r.rising_hyp.verdict);
    csv += '\n';
  }
  WriteTextFile(opt.out_csv, csv);

  std::array<ClassMean, intonate::kNumSentenceTypes> per_class;
  ClassMean all;
  for (size_t i = 0; i < n; ++i) {
    ClassMean& m = per_class[static_cast<int>(utts[i].label)];
    for (ClassMean* target : {&m, &all}) {
      target->ffe += reports[i].ffe;
      target->gpe += reports[i].gpe;
      target->vde += reports[i].vde;
      target->mcd += reports[i].mean_mcd;
      ++target->count;
    }
  }
  auto mean_json = [](const ClassMean& m) {
    nlohmann::json j;
    const double denom = m.count > 0 ? static_cast<double>(m.count) : 1.0;
    j["ffe"] = m.ffe / denom;
    j["gpe"] = m.gpe / denom;
    j["vde"] = m.vde / denom;
    j["mean_mcd"] = m.mcd / denom;
    j["count"] = m.count;
    return j;
  };

  nlohmann::json summary;
  summary["config"] = {{"manifest", opt.manifest},
                       {"ref_dir", opt.ref_dir},
                       {"hyp_dir", opt.hyp_dir},
                       {"jobs", opt.jobs},
                       {"deviation_tol", opt.cfg.deviation_tol},
                       {"spectral", SpectralConfigJson(opt.cfg.spectral)},
                       {"pitch", PitchConfigJson(opt.cfg.pitch)},
                       {"rise", RiseConfigJson(opt.cfg.rise)}};
  for (int c = 0; c < intonate::kNumSentenceTypes; ++c) {
    summary["per_class"][std::string(intonate::to_label(static_cast<SentenceType>(c)))] =
        mean_json(per_class[c]);
  }
  summary["per_class"]["all"] = mean_json(all);
  for (size_t i = 0; i < n; ++i) {
    nlohmann::json pair = nlohmann::json::parse(intonate::report_to_json(reports[i]));
    pair["id"] = utts[i].id;
    pair["class"] = intonate::to_label(utts[i].label);
    summary["pairs"].push_back(std::move(pair));
  }
  WriteTextFile(opt.out_json, summary.dump(2) + "\n");

  std::printf("evaluated %zu pairs\n", n);
  for (int c = 0; c < intonate::kNumSentenceTypes; ++c) {
    const ClassMean& m = per_class[c];
    if (m.count == 0) continue;
    std::printf("  %-5s ffe=%.4f gpe=%.4f vde=%.4f mcd=%.3f (n=%zu)\n",
                std::string(intonate::to_label(static_cast<SentenceType>(c))).c_str(),
                m.ffe / m.count, m.gpe / m.count, m.vde / m.count, m.mcd / m.count, m.count);
  }
  if (all.count > 0) {
    std::printf("  %-5s ffe=%.4f gpe=%.4f vde=%.4f mcd=%.3f (n=%zu)\n", "all",
                all.ffe / all.count, all.gpe / all.count, all.vde / all.count,
                all.mcd / all.count, all.count);
  }
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string manifest;
  std::string out = "checkpoint.json";
  std::string history;
  std::string embedding_tsv;
  bool augment_strip_punct = false;
  std::vector<double> class_weights;  // empty -> TrainConfig default
  TrainConfig cfg;
};

void RunTrain(const TrainOptions& opt) {
  std::vector<Utterance> utts = intonate::parse_manifest(opt.manifest);
  if (utts.empty()) throw std::runtime_error("empty manifest: " + opt.manifest);
  if (opt.augment_strip_punct) {
    std::size_t dropped = 0;
    std::vector<Utterance> extra = intonate::strip_end_punctuation(utts, &dropped);
    if (dropped > 0) {
      std::fprintf(stderr, "warning: %zu augmented texts became empty and were dropped\n",
                   dropped);
    }
    utts.insert(utts.end(), extra.begin(), extra.end());
  }
  std::vector<LabeledText> dataset;
  dataset.reserve(utts.size());
  for (const Utterance& utt : utts) dataset.push_back({utt.text, utt.label});

  std::optional<intonate::TokenEmbedder> pretrained;
  if (!opt.embedding_tsv.empty()) {
    pretrained = intonate::load_embedder_tsv(opt.embedding_tsv);
  }
  const intonate::TrainResult result =
      intonate::train(dataset, opt.cfg, pretrained ? &*pretrained : nullptr);

  intonate::save_checkpoint(opt.out, result.params, &result.config);
  if (!opt.history.empty()) intonate::write_history_csv(opt.history, result.history);

  const intonate::EpochStats& last = result.history.back();
  std::printf("trained %zu examples for %d epochs: loss=%.6f acc=%.4f\n", dataset.size(),
              opt.cfg.epochs, last.mean_loss, last.accuracy);
  std::printf("checkpoint written to %s\n", opt.out.c_str());
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyOptions {
  std::string checkpoint;
  std::string manifest;
  std::string text;
  std::string out;
};

void RunClassify(const ClassifyOptions& opt) {
  const ClassifierParams params = intonate::load_checkpoint(opt.checkpoint);
  std::vector<Utterance> inputs;
  if (!opt.manifest.empty()) {
    inputs = intonate::parse_manifest(opt.manifest);
  } else {
    inputs.push_back({"text", opt.text, SentenceType::kStatement, ""});
  }

  nlohmann::json out;
  out["config"] = {{"checkpoint", opt.checkpoint},
                   {"manifest", opt.manifest},
                   {"text", opt.text}};
  out["predictions"] = nlohmann::json::array();
  std::size_t correct = 0;
  for (const Utterance& utt : inputs) {
    const intonate::Prediction pred = intonate::predict(utt.text, params);
    nlohmann::json j;
    j["id"] = utt.id;
    j["predicted"] = intonate::to_label(pred.label);
    j["probs"] = pred.probs;
    j["alpha"] = pred.alpha;
    out["predictions"].push_back(std::move(j));
    if (!opt.manifest.empty() && pred.label == utt.label) ++correct;
  }
  if (!opt.manifest.empty()) {
    out["accuracy"] = static_cast<double>(correct) / static_cast<double>(inputs.size());
  }

  const std::string dumped = out.dump(2) + "\n";
  if (opt.out.empty()) {
    std::fputs(dumped.c_str(), stdout);
  } else {
    WriteTextFile(opt.out, dumped);
    if (!opt.manifest.empty()) {
      std::printf("classified %zu texts, accuracy %.4f\n", inputs.size(),
                  out["accuracy"].get<double>());
    }
  }
}

// ---------------------------------------------------------------------------
// say

struct SayOptions {
  std::string checkpoint;
  std::string text;
  std::string label;  // empty -> classifier-driven
  std::string out_wav = "say.wav";
  std::string out_json;
  ContourSpec contour;       // duration <= 0 -> derived from text length
  double duration = 0.0;
  int sample_rate = 22050;
  int harmonics = 3;
  int frame_length = 1024;
  int hop_length = 256;
  RiseConfig rise;
};

void RunSay(const SayOptions& opt) {
  const ClassifierParams params = intonate::load_checkpoint(opt.checkpoint);

  SentenceType type;
  std::string label_source;
  std::optional<intonate::Prediction> pred;
  if (!opt.label.empty()) {
    const auto parsed = intonate::parse_label(opt.label);
    if (!parsed) throw std::runtime_error("unknown label '" + opt.label + "' (expected sta|que|decq)");
    type = *parsed;
    label_source = "given";
  } else {
    pred = intonate::predict(opt.text, params);
    type = pred->label;
    label_source = "predicted";
  }

  // The table row for the chosen type conditions the rendering stage.
  const std::span<const double> table_row = intonate::intonation_lookup(type, params);
  double row_norm = 0.0;
  for (const double v : table_row) row_norm += v * v;
  row_norm = std::sqrt(row_norm);

  ContourSpec spec = opt.contour;
  spec.duration = opt.duration > 0.0
                      ? opt.duration
                      : std::max(0.8, 0.1 * static_cast<double>(
                                           intonate::utf8_chars(opt.text).size()));

  const double hop_seconds = static_cast<double>(opt.hop_length) / opt.sample_rate;
  const PitchTrack track = intonate::render_contour(spec, type, hop_seconds);
  const AudioBuffer audio =
      intonate::tone_from_contour(track, opt.sample_rate, opt.harmonics, opt.frame_length);
  intonate::save_wav(opt.out_wav, audio);

  // Self check: measure the rendered audio the same way eval would.
  PitchConfig pitch_cfg;
  pitch_cfg.frame_length = opt.frame_length;
  pitch_cfg.hop_length = opt.hop_length;
  const PitchTrack measured = intonate::extract_f0(audio, pitch_cfg);
  const intonate::RiseResult rise = intonate::detect_rising(measured, opt.rise);

  nlohmann::json j;
  j["text"] = opt.text;
  j["label"] = intonate::to_label(type);
  j["label_source"] = label_source;
  if (pred) j["probs"] = pred->probs;
  j["intonation_embedding_norm"] = row_norm;
  j["rise_detected"] = rise.verdict == intonate::RiseVerdict::kRising;
  j["rise_verdict"] = intonate::to_string(rise.verdict);
  j["rise_ratio"] = rise.rise_ratio;
  j["out_wav"] = opt.out_wav;
  j["config"] = {{"checkpoint", opt.checkpoint},
                 {"base_f0", spec.base_f0},
                 {"declination", spec.declination},
                 {"duration", spec.duration},
                 {"rise_onset_fraction", spec.rise_onset_fraction},
                 {"rise_ratio", spec.rise_ratio},
                 {"jitter_std", spec.jitter_std},
                 {"jitter_seed", spec.jitter_seed},
                 {"sample_rate", opt.sample_rate},
                 {"harmonics", opt.harmonics},
                 {"frame_length", opt.frame_length},
                 {"hop_length", opt.hop_length},
                 {"rise_detector", RiseConfigJson(opt.rise)}};

  const std::string dumped = j.dump(2) + "\n";
  if (opt.out_json.empty()) {
    std::fputs(dumped.c_str(), stdout);
  } else {
    WriteTextFile(opt.out_json, dumped);
    std::printf("%s (%s): %s, rise=%s\n", opt.text.c_str(), label_source.c_str(),
                std::string(intonate::to_label(type)).c_str(),
                std::string(intonate::to_string(rise.verdict)).c_str());
  }
}

// ---------------------------------------------------------------------------
// f0

struct F0Options {
  std::string input;
  std::string out;
  PitchConfig cfg;
};

void RunF0(const F0Options& opt) {
  const AudioBuffer audio = intonate::load_wav(opt.input);
  const PitchTrack track = intonate::extract_f0(audio, opt.cfg);
  intonate::write_pitch_csv(opt.out, track);

  int voiced = 0;
  std::vector<double> voiced_f0;
  for (int i = 0; i < track.frames(); ++i) {
    if (track.voiced[i]) {
      ++voiced;
      voiced_f0.push_back(track.f0[i]);
    }
  }
  std::sort(voiced_f0.begin(), voiced_f0.end());
  const double median =
      voiced_f0.empty()
          ? 0.0
          : (voiced_f0.size() % 2 == 1
                 ? voiced_f0[voiced_f0.size() / 2]
                 : 0.5 * (voiced_f0[voiced_f0.size() / 2 - 1] + voiced_f0[voiced_f0.size() / 2]));

  nlohmann::json j;
  j["config"] = {{"input", opt.input}, {"out", opt.out}, {"pitch", PitchConfigJson(opt.cfg)}};
  j["frames"] = track.frames();
  j["voiced_fraction"] = track.frames() > 0
                             ? static_cast<double>(voiced) / track.frames()
                             : 0.0;
  j["median_voiced_f0"] = median;
  std::fputs((j.dump(2) + "\n").c_str(), stdout);
}

// ---------------------------------------------------------------------------
// synth-corpus

struct SynthOptions {
  std::string out_dir;
  SyntheticDatasetConfig cfg;
};

void RunSynthCorpus(const SynthOptions& opt) {
  const std::vector<Utterance> utts = intonate::make_synthetic_dataset(opt.cfg, opt.out_dir);
  const intonate::CorpusStats stats = intonate::corpus_stats(utts);
  nlohmann::json j = nlohmann::json::parse(intonate::stats_to_json(stats));
  j["config"] = {{"out_dir", opt.out_dir},
                 {"n_per_class", opt.cfg.n_per_class},
                 {"seed", opt.cfg.seed},
                 {"base_f0_min", opt.cfg.base_f0_min},
                 {"base_f0_max", opt.cfg.base_f0_max},
                 {"declination", opt.cfg.declination},
                 {"rise_onset_fraction", opt.cfg.rise_onset_fraction},
                 {"rise_ratio", opt.cfg.rise_ratio},
                 {"jitter_std", opt.cfg.jitter_std},
                 {"sample_rate", opt.cfg.sample_rate},
                 {"harmonics", opt.cfg.harmonics},
                 {"frame_length", opt.cfg.frame_length},
                 {"hop_length", opt.cfg.hop_length}};
  j["manifest"] = (std::filesystem::path(opt.out_dir) / "manifest.tsv").string();
  std::fputs((j.dump(2) + "\n").c_str(), stdout);
}

// ---------------------------------------------------------------------------
// stats

struct StatsOptions {
  std::string manifest;
  std::string out;
};

void RunStats(const StatsOptions& opt) {
  const std::vector<Utterance> utts = intonate::parse_manifest(opt.manifest);
  nlohmann::json j = nlohmann::json::parse(intonate::stats_to_json(intonate::corpus_stats(utts)));
  j["config"] = {{"manifest", opt.manifest}};
  const std::string dumped = j.dump(2) + "\n";
  std::fputs(dumped.c_str(), stdout);
  if (!opt.out.empty()) WriteTextFile(opt.out, dumped);
}

// ---------------------------------------------------------------------------
// check-grad

struct CheckGradOptions {
  int trials = 50;
  unsigned seed = 0;
  double step = 1e-5;
  double tolerance = 1e-4;
};

double BatchLoss(const ClassifierParams& params, const std::vector<LabeledText>& batch,
                 const std::array<double, 3>& weights) {
  double total = 0.0;
  for (const LabeledText& ex : batch) {
    const Matrix h = intonate::encode_tokens(ex.text, params.embedder);
    const intonate::AttentionOutput pooled = intonate::attention_pool(h, params.pooling);
    const auto probs = intonate::classify(pooled.embedding, params.head_weight, params.head_bias);
    total += intonate::weighted_cross_entropy(probs, ex.label, weights);
  }
  return total / static_cast<double>(batch.size());
}

// Central finite differences over every scalar parameter.
double MaxRelativeError(ClassifierParams& params, const std::vector<LabeledText>& batch,
                        const std::array<double, 3>& weights, bool freeze, double step) {
  const intonate::Gradients analytic = intonate::gradients(params, batch, weights, freeze);
  double worst = 0.0;
  auto probe = [&](double& value, double grad) {
    const double saved = value;
    value = saved + step;
    const double up = BatchLoss(params, batch, weights);
    value = saved - step;
    const double down = BatchLoss(params, batch, weights);
    value = saved;
    const double fd = (up - down) / (2.0 * step);
    const double denom = std::max(std::abs(grad) + std::abs(fd), 1e-8);
    worst = std::max(worst, std::abs(grad - fd) / denom);
  };
  if (!freeze) {
    for (size_t i = 0; i < params.embedder.embedding.data().size(); ++i) {
      probe(params.embedder.embedding.data()[i], analytic.embedding.data()[i]);
    }
  } else {
    for (const double g : analytic.embedding.data()) {
      if (g != 0.0) return 1e9;  // frozen block must be exactly zero
    }
  }
  for (size_t i = 0; i < params.pooling.weight.data().size(); ++i) {
    probe(params.pooling.weight.data()[i], analytic.pool_weight.data()[i]);
  }
  for (size_t i = 0; i < params.pooling.bias.size(); ++i) {
    probe(params.pooling.bias[i], analytic.pool_bias[i]);
  }
  for (size_t i = 0; i < params.pooling.query.size(); ++i) {
    probe(params.pooling.query[i], analytic.pool_query[i]);
  }
  for (size_t i = 0; i < params.head_weight.data().size(); ++i) {
    probe(params.head_weight.data()[i], analytic.head_weight.data()[i]);
  }
  for (size_t i = 0; i < params.head_bias.size(); ++i) {
    probe(params.head_bias[i], analytic.head_bias[i]);
  }
  return worst;
}

// Small random configuration: dim 4, attention dim 3, texts of <= 4
// characters, parameters in [-0.5, 0.5].
ClassifierParams RandomParams(std::mt19937& rng, const std::vector<std::string>& texts) {
  auto uniform = [&rng]() {
    return -0.5 + static_cast<double>(rng()) / 4294967296.0;
  };
  ClassifierParams params;
  params.embedder = intonate::build_embedder(texts, 4);
  for (double& v : params.embedder.embedding.data()) v = uniform();
  params.pooling.weight = Matrix(3, 4);
  for (double& v : params.pooling.weight.data()) v = uniform();
  params.pooling.bias = {uniform(), uniform(), uniform()};
  params.pooling.query = {uniform(), uniform(), uniform()};
  params.head_weight = Matrix(3, 4);
  for (double& v : params.head_weight.data()) v = uniform();
  params.head_bias = {uniform(), uniform(), uniform()};
  params.intonation_table = Matrix(3, 4);
  return params;
}

void RunCheckGrad(const CheckGradOptions& opt) {
  const std::vector<std::string> alphabet = {"他", "去", "学", "校", "？", "。", "不"};
  std::mt19937 rng(opt.seed);
  double worst = 0.0;
  for (int trial = 0; trial < opt.trials; ++trial) {
    const int batch_size = 1 + static_cast<int>(rng() % 4);
    std::vector<LabeledText> batch;
    std::vector<std::string> texts;
    for (int b = 0; b < batch_size; ++b) {
      const int len = 1 + static_cast<int>(rng() % 4);
      std::string text;
      for (int i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
      batch.push_back({text, static_cast<SentenceType>(rng() % 3)});
      texts.push_back(text);
    }
    ClassifierParams params = RandomParams(rng, texts);
    const std::array<double, 3> weights = {1.0, 10.0, 20.0};
    const bool freeze = trial % 5 == 4;
    worst = std::max(worst,
                     MaxRelativeError(params, batch, weights, freeze, opt.step));
  }
  nlohmann::json j;
  j["config"] = {{"trials", opt.trials},
                 {"seed", opt.seed},
                 {"step", opt.step},
                 {"tolerance", opt.tolerance}};
  j["max_relative_error"] = worst;
  j["pass"] = worst < opt.tolerance;
  std::fputs((j.dump(2) + "\n").c_str(), stdout);
  if (worst >= opt.tolerance) {
    throw std::runtime_error("gradient check failed");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prosody toolkit: sentence-type classification, intonation "
               "rendering and objective pitch evaluation"};
  app.require_subcommand(1);

  EvalOptions eval_opt;
  CLI::App* eval = app.add_subcommand(
      "eval", "Compare reference and synthesized audio pairs (FFE, MCD, rising detection)");
  eval->add_option("--manifest", eval_opt.manifest, "TSV manifest of utterances")->required();
  eval->add_option("--ref-dir", eval_opt.ref_dir, "Directory with <id>.wav references")->required();
  eval->add_option("--hyp-dir", eval_opt.hyp_dir, "Directory with <id>.wav hypotheses")->required();
  eval->add_option("--out-csv", eval_opt.out_csv, "Batch CSV output");
  eval->add_option("--out-json", eval_opt.out_json, "Summary JSON output");
  eval->add_option("--jobs", eval_opt.jobs, "Worker threads");
  eval->add_option("--deviation-tol", eval_opt.cfg.deviation_tol,
                   "Relative pitch deviation counted as a gross error");
  AddSpectralFlags(eval, eval_opt.cfg.spectral);
  AddPitchFlags(eval, eval_opt.cfg.pitch);
  AddRiseFlags(eval, eval_opt.cfg.rise);
  eval->callback([&]() {
    eval_opt.cfg.pitch.frame_length = eval_opt.cfg.spectral.frame_length;
    eval_opt.cfg.pitch.hop_length = eval_opt.cfg.spectral.hop_length;
    RunEval(eval_opt);
  });

  TrainOptions train_opt;
  CLI::App* train = app.add_subcommand("train", "Train the sentence-type classifier");
  train->add_option("--manifest", train_opt.manifest, "TSV manifest (text-only rows accepted)")->required();
  train->add_option("--out", train_opt.out, "Checkpoint JSON output");
  train->add_option("--history", train_opt.history, "Per-epoch loss/accuracy CSV");
  train->add_option("--lr", train_opt.cfg.learning_rate, "Learning rate");
  train->add_option("--batch-size", train_opt.cfg.batch_size, "Batch size");
  train->add_option("--epochs", train_opt.cfg.epochs, "Training epochs");
  train->add_option("--seed", train_opt.cfg.seed, "Initialization and shuffling seed");
  train->add_option("--class-weights", train_opt.class_weights,
                    "Loss weights for sta, que, decq")->expected(3);
  train->add_flag("--freeze-embeddings", train_opt.cfg.freeze_embedder,
                  "Do not update token embeddings");
  train->add_flag("--augment-strip-punct", train_opt.augment_strip_punct,
                  "Also train on punctuation-stripped copies (decq relabeled sta)");
  train->add_option("--embed-dim", train_opt.cfg.embed_dim, "Token embedding dimension");
  train->add_option("--attn-dim", train_opt.cfg.attn_dim, "Attention hidden dimension");
  train->add_option("--table-dim", train_opt.cfg.table_dim, "Intonation embedding dimension");
  train->add_option("--embedding-tsv", train_opt.embedding_tsv,
                    "Pre-computed token vectors (token<TAB>floats)");
  train->callback([&]() {
    if (!train_opt.class_weights.empty()) {
      for (int c = 0; c < 3; ++c) train_opt.cfg.class_weights[c] = train_opt.class_weights[c];
    }
    RunTrain(train_opt);
  });

  ClassifyOptions classify_opt;
  CLI::App* classify = app.add_subcommand("classify", "Predict sentence types with a checkpoint");
  classify->add_option("--checkpoint", classify_opt.checkpoint, "Checkpoint JSON")->required();
  CLI::Option* cm = classify->add_option("--manifest", classify_opt.manifest, "TSV manifest to classify");
  classify->add_option("--text", classify_opt.text, "Single text to classify")->excludes(cm);
  classify->add_option("--out", classify_opt.out, "Predictions JSON (stdout when omitted)");
  classify->callback([&]() {
    if (classify_opt.manifest.empty() && classify_opt.text.empty()) {
      throw CLI::ValidationError("classify", "one of --manifest or --text is required");
    }
    RunClassify(classify_opt);
  });

  SayOptions say_opt;
  CLI::App* say = app.add_subcommand(
      "say", "Render an intonation contour for a text and synthesize a tone");
  say->add_option("--checkpoint", say_opt.checkpoint, "Checkpoint JSON")->required();
  say->add_option("--text", say_opt.text, "Input text")->required();
  say->add_option("--label", say_opt.label, "Force a sentence type (sta|que|decq) instead of predicting");
  say->add_option("--out-wav", say_opt.out_wav, "Rendered audio output");
  say->add_option("--out-json", say_opt.out_json, "Report JSON (stdout when omitted)");
  say->add_option("--base-f0", say_opt.contour.base_f0, "Starting pitch, Hz");
  say->add_option("--declination", say_opt.contour.declination, "Baseline slope, Hz/s");
  say->add_option("--duration", say_opt.duration, "Seconds (default: from text length)");
  say->add_option("--rise-onset", say_opt.contour.rise_onset_fraction,
                  "Fraction of the utterance where the rise starts");
  say->add_option("--rise-ratio", say_opt.contour.rise_ratio, "Final multiplier of the rise");
  say->add_option("--jitter-std", say_opt.contour.jitter_std, "Per-frame pitch jitter, Hz");
  say->add_option("--seed", say_opt.contour.jitter_seed, "Jitter seed");
  say->add_option("--sample-rate", say_opt.sample_rate, "Output sample rate");
  say->add_option("--harmonics", say_opt.harmonics, "Harmonics in the rendered tone");
  say->add_option("--frame-length", say_opt.frame_length, "Analysis frame for the self check");
  say->add_option("--hop-length", say_opt.hop_length, "Analysis hop for the self check");
  AddRiseFlags(say, say_opt.rise);
  say->callback([&]() { RunSay(say_opt); });

  F0Options f0_opt;
  CLI::App* f0 = app.add_subcommand("f0", "Extract a pitch track to CSV");
  f0->add_option("--in", f0_opt.input, "Input WAV")->required();
  f0->add_option("--out", f0_opt.out, "Pitch track CSV")->required();
  AddPitchFlags(f0, f0_opt.cfg);
  f0->add_option("--frame-length", f0_opt.cfg.frame_length, "Analysis frame length, samples");
  f0->add_option("--hop-length", f0_opt.cfg.hop_length, "Hop between frames, samples");
  f0->callback([&]() { RunF0(f0_opt); });

  SynthOptions synth_opt;
  CLI::App* synth = app.add_subcommand("synth-corpus",
                                       "Generate a labeled toy corpus with rendered audio");
  synth->add_option("--out-dir", synth_opt.out_dir, "Output directory")->required();
  synth->add_option("--n-per-class", synth_opt.cfg.n_per_class, "Utterances per sentence type");
  synth->add_option("--seed", synth_opt.cfg.seed, "Generator seed");
  synth->add_option("--base-f0-min", synth_opt.cfg.base_f0_min, "Lowest per-utterance base pitch");
  synth->add_option("--base-f0-max", synth_opt.cfg.base_f0_max, "Highest per-utterance base pitch");
  synth->add_option("--declination", synth_opt.cfg.declination, "Baseline slope, Hz/s");
  synth->add_option("--rise-onset", synth_opt.cfg.rise_onset_fraction,
                    "Fraction of the utterance where the rise starts");
  synth->add_option("--rise-ratio", synth_opt.cfg.rise_ratio, "Final multiplier of the rise");
  synth->add_option("--jitter-std", synth_opt.cfg.jitter_std, "Per-frame pitch jitter, Hz");
  synth->add_option("--sample-rate", synth_opt.cfg.sample_rate, "Audio sample rate");
  synth->add_option("--harmonics", synth_opt.cfg.harmonics, "Harmonics in rendered tones");
  synth->callback([&]() { RunSynthCorpus(synth_opt); });

  StatsOptions stats_opt;
  CLI::App* stats = app.add_subcommand("stats", "Per-class counts and ratios of a manifest");
  stats->add_option("--manifest", stats_opt.manifest, "TSV manifest")->required();
  stats->add_option("--out", stats_opt.out, "Stats JSON (also printed)");
  stats->callback([&]() { RunStats(stats_opt); });

  CheckGradOptions grad_opt;
  CLI::App* grad = app.add_subcommand("check-grad",
                                      "Finite-difference check of the classifier gradients");
  grad->add_option("--trials", grad_opt.trials, "Random configurations to test");
  grad->add_option("--seed", grad_opt.seed, "Generator seed");
  grad->add_option("--step", grad_opt.step, "Finite-difference step");
  grad->add_option("--tolerance", grad_opt.tolerance, "Maximum relative error accepted");
  grad->callback([&]() { RunCheckGrad(grad_opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
