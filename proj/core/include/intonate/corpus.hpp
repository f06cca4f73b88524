// core/include/intonate/corpus.hpp

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

#ifndef INTONATE_CORPUS_HPP_
#define INTONATE_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intonate {

// The three sentence categories. Integer codes are stable and used in
// manifests, checkpoints and reports.
enum class SentenceType : int {
  kStatement = 0,
  kNormalQuestion = 1,
  kDeclarativeQuestion = 2,
};

inline constexpr int kNumSentenceTypes = 3;

// Short manifest labels: "sta", "que", "decq".
std::string_view to_label(SentenceType type);
std::optional<SentenceType> parse_label(std::string_view label);

struct Utterance {
  std::string id;
  std::string text;
  SentenceType label = SentenceType::kStatement;
  std::string audio_path;  // empty when the utterance is text-only

  bool operator==(const Utterance&) const = default;
};

struct CorpusSplit {
  std::vector<Utterance> train;
  std::vector<Utterance> test;
};

struct CorpusStats {
  std::array<std::size_t, kNumSentenceTypes> counts{};
  std::array<double, kNumSentenceTypes> ratios{};  // zeros for an empty corpus
  std::size_t total = 0;
};

// Reads a TSV manifest: id<TAB>text<TAB>label[<TAB>audio_path], UTF-8,
// LF line endings, no header. Throws std::runtime_error naming the line
// on malformed records, unknown labels and duplicate ids.
std::vector<Utterance> parse_manifest(const std::filesystem::path& path);

// Inverse of parse_manifest; writes LF-terminated TSV rows in order.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<Utterance>& utterances);

// Splits per class so the test side holds round-half-up(test_fraction * n)
// utterances of each class, sampled without replacement with a generator
// seeded by `seed`. Train keeps input order; test is sorted by input
// position. Throws when a class is absent, when test_fraction is outside
// (0,1), or when the rounding would leave a class with no train utterances.
CorpusSplit stratified_split(const std::vector<Utterance>& utterances,
                             double test_fraction, unsigned seed);

// Returns copies with the trailing end-punctuation run removed and ids
// suffixed "-nopunct". Declarative questions are relabeled as statements;
// the other labels are kept. Utterances whose text becomes empty are
// dropped and counted into *dropped when provided.
std::vector<Utterance> strip_end_punctuation(
    const std::vector<Utterance>& utterances, std::size_t* dropped = nullptr);

CorpusStats corpus_stats(const std::vector<Utterance>& utterances);

std::string stats_to_json(const CorpusStats& stats);

// Keeps only utterances the predicate accepts. Hook for callers that need
// to exclude samples (e.g. code-mixed text) by their own rule.
std::vector<Utterance> filter_utterances(
    const std::vector<Utterance>& utterances,
    const std::function<bool(const Utterance&)>& keep);

}  // namespace intonate

#endif  // INTONATE_CORPUS_HPP_
