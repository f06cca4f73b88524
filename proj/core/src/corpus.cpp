// core/src/corpus.cpp

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

#include "intonate/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "intonate/text.hpp"
#include "json.hpp"

namespace intonate {

namespace {

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

[[noreturn]] void ManifestError(const std::filesystem::path& path, size_t line_no,
                                const std::string& what) {
  std::ostringstream os;
  os << path.string() << ":" << line_no << ": " << what;
  throw std::runtime_error(os.str());
}

}  // namespace

std::string_view to_label(SentenceType type) {
  switch (type) {
    case SentenceType::kStatement: return "sta";
    case SentenceType::kNormalQuestion: return "que";
    case SentenceType::kDeclarativeQuestion: return "decq";
  }
  return "sta";
}

std::optional<SentenceType> parse_label(std::string_view label) {
  if (label == "sta") return SentenceType::kStatement;
  if (label == "que") return SentenceType::kNormalQuestion;
  if (label == "decq") return SentenceType::kDeclarativeQuestion;
  return std::nullopt;
}

std::vector<Utterance> parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open manifest: " + path.string());
  }
  std::vector<Utterance> utterances;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = SplitTabs(line);
    if (fields.size() < 3 || fields.size() > 4) {
      ManifestError(path, line_no, "expected 3 or 4 tab-separated fields, got " +
                                       std::to_string(fields.size()));
    }
    Utterance utt;
    utt.id = fields[0];
    utt.text = fields[1];
    if (utt.id.empty()) ManifestError(path, line_no, "empty id");
    if (utt.text.empty()) ManifestError(path, line_no, "empty text");
    const auto label = parse_label(fields[2]);
    if (!label) {
      ManifestError(path, line_no, "unknown label '" + fields[2] +
                                       "' (expected sta|que|decq)");
    }
    utt.label = *label;
    if (fields.size() == 4) utt.audio_path = fields[3];
    if (!seen_ids.insert(utt.id).second) {
      ManifestError(path, line_no, "duplicate id '" + utt.id + "'");
    }
    utterances.push_back(std::move(utt));
  }
  return utterances;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<Utterance>& utterances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write manifest: " + path.string());
  }
  for (const Utterance& utt : utterances) {
    out << utt.id << '\t' << utt.text << '\t' << to_label(utt.label);
    if (!utt.audio_path.empty()) out << '\t' << utt.audio_path;
    out << '\n';
  }
}

CorpusSplit stratified_split(const std::vector<Utterance>& utterances,
                             double test_fraction, unsigned seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0,1)");
  }
  std::array<std::vector<size_t>, kNumSentenceTypes> by_class;
  for (size_t i = 0; i < utterances.size(); ++i) {
    by_class[static_cast<int>(utterances[i].label)].push_back(i);
  }
  for (int c = 0; c < kNumSentenceTypes; ++c) {
    if (by_class[c].empty()) {
      throw std::runtime_error(std::string("stratified_split: class '") +
                               std::string(to_label(static_cast<SentenceType>(c))) +
                               "' has no utterances");
    }
  }

  // One generator drives all classes in type order, so the whole split is a
  // deterministic function of (input order, seed). Fisher-Yates is spelled
  // out here instead of std::shuffle to keep the byte-level result
  // independent of the standard library implementation.
  std::mt19937 rng(seed);
  std::vector<bool> in_test(utterances.size(), false);
  for (int c = 0; c < kNumSentenceTypes; ++c) {
    std::vector<size_t>& pool = by_class[c];
    const size_t n = pool.size();
    const auto take = static_cast<size_t>(
        std::floor(test_fraction * static_cast<double>(n) + 0.5));
    if (take >= n) {
      throw std::runtime_error(
          std::string("stratified_split: class '") +
          std::string(to_label(static_cast<SentenceType>(c))) +
          "' would have an empty train side");
    }
    for (size_t i = n - 1; i > 0; --i) {
      const size_t j = rng() % (i + 1);
      std::swap(pool[i], pool[j]);
    }
    for (size_t i = 0; i < take; ++i) in_test[pool[i]] = true;
  }

  CorpusSplit split;
  for (size_t i = 0; i < utterances.size(); ++i) {
    (in_test[i] ? split.test : split.train).push_back(utterances[i]);
  }
  return split;
}

std::vector<Utterance> strip_end_punctuation(
    const std::vector<Utterance>& utterances, std::size_t* dropped) {
  std::vector<Utterance> out;
  out.reserve(utterances.size());
  size_t dropped_count = 0;
  for (const Utterance& utt : utterances) {
    std::string stripped = strip_trailing_punctuation(utt.text);
    if (stripped.empty()) {
      ++dropped_count;
      continue;
    }
    Utterance copy = utt;
    copy.id += "-nopunct";
    copy.text = std::move(stripped);
    // Without its question mark a declarative question reads as a statement.
    if (copy.label == SentenceType::kDeclarativeQuestion) {
      copy.label = SentenceType::kStatement;
    }
    out.push_back(std::move(copy));
  }
  if (dropped != nullptr) *dropped = dropped_count;
  return out;
}

CorpusStats corpus_stats(const std::vector<Utterance>& utterances) {
  CorpusStats stats;
  for (const Utterance& utt : utterances) {
    ++stats.counts[static_cast<int>(utt.label)];
  }
  stats.total = utterances.size();
  if (stats.total > 0) {
    for (int c = 0; c < kNumSentenceTypes; ++c) {
      stats.ratios[c] =
          static_cast<double>(stats.counts[c]) / static_cast<double>(stats.total);
    }
  }
  return stats;
}

std::string stats_to_json(const CorpusStats& stats) {
  nlohmann::json j;
  for (int c = 0; c < kNumSentenceTypes; ++c) {
    const std::string key{to_label(static_cast<SentenceType>(c))};
    j["counts"][key] = stats.counts[c];
    j["ratios"][key] = stats.ratios[c];
  }
  j["total"] = stats.total;
  return j.dump(2);
}

std::vector<Utterance> filter_utterances(
    const std::vector<Utterance>& utterances,
    const std::function<bool(const Utterance&)>& keep) {
  std::vector<Utterance> out;
  for (const Utterance& utt : utterances) {
    if (keep(utt)) out.push_back(utt);
  }
  return out;
}

}  // namespace intonate
