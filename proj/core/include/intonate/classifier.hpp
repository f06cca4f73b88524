// core/include/intonate/classifier.hpp

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

#ifndef INTONATE_CLASSIFIER_HPP_
#define INTONATE_CLASSIFIER_HPP_

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "intonate/corpus.hpp"
#include "intonate/matrix.hpp"

namespace intonate {

// Character-level token embedding with a sequence-initial classifier slot.
// Index 0 is always "[CLS]"; index 1 is "[UNK]", the fallback for
// characters outside the vocabulary.
struct TokenEmbedder {
  std::vector<std::string> tokens;              // index -> token
  std::unordered_map<std::string, int> vocab;   // token -> index
  Matrix embedding;                             // vocab_size x dim

  int dim() const { return embedding.cols(); }
  int size() const { return embedding.rows(); }
};

inline constexpr int kClsIndex = 0;
inline constexpr int kUnkIndex = 1;

// Vocabulary from the characters of the given texts, in first-appearance
// order after the two specials. The embedding matrix is zero; training
// initializes it.
TokenEmbedder build_embedder(std::span<const std::string> texts, int dim);

// Loads per-token vectors from TSV rows "token<TAB>v1<TAB>...<TAB>vd".
// [CLS] and [UNK] take their rows from the file when present; otherwise
// they get zero vectors. All rows must agree on dimension.
TokenEmbedder load_embedder_tsv(const std::filesystem::path& path);

// Token indices for a text: [CLS] followed by one index per character.
std::vector<int> encode_indices(std::string_view text, const TokenEmbedder& embedder);

// Token representations: (1 + #characters) x dim, row 0 the [CLS] row.
// Throws on empty text.
Matrix encode_tokens(std::string_view text, const TokenEmbedder& embedder);

// Learned scoring function for attention pooling.
struct PoolingParams {
  Matrix weight;             // attn_dim x dim
  std::vector<double> bias;  // attn_dim
  std::vector<double> query; // attn_dim
};

// score_t = query . tanh(weight * h_t + bias); weights = softmax(scores);
// embedding = sum_t weights[t] * h_t.
struct AttentionOutput {
  std::vector<double> embedding;  // pooled sentence embedding, length dim
  std::vector<double> weights;    // attention weights, sum to 1
  std::vector<double> scores;     // raw scores, kept for inspection
};

AttentionOutput attention_pool(const Matrix& h, const PoolingParams& pooling);

// Softmax of head_weight * sentence + head_bias; probabilities over the
// three sentence types.
std::array<double, kNumSentenceTypes> classify(std::span<const double> sentence,
                                               const Matrix& head_weight,
                                               std::span<const double> head_bias);

// -class_weights[label] * ln(probs[label]).
double weighted_cross_entropy(std::span<const double> probs, SentenceType label,
                              const std::array<double, kNumSentenceTypes>& class_weights);

struct ClassifierParams {
  TokenEmbedder embedder;
  PoolingParams pooling;
  Matrix head_weight;            // 3 x dim
  std::vector<double> head_bias; // 3
  Matrix intonation_table;       // 3 x table_dim, one row per sentence type
};

struct LabeledText {
  std::string text;
  SentenceType label = SentenceType::kStatement;
};

// Gradient record with the same shapes as the trainable parameters.
struct Gradients {
  Matrix embedding;
  Matrix pool_weight;
  std::vector<double> pool_bias;
  std::vector<double> pool_query;
  Matrix head_weight;
  std::vector<double> head_bias;
};

// Mean gradient of the class-weighted cross-entropy over the batch.
// The embedding block is exactly zero when freeze_embedder is set.
Gradients gradients(const ClassifierParams& params, std::span<const LabeledText> batch,
                    const std::array<double, kNumSentenceTypes>& class_weights,
                    bool freeze_embedder);

struct TrainConfig {
  double learning_rate = 0.1;
  int batch_size = 32;
  int epochs = 200;
  std::array<double, kNumSentenceTypes> class_weights = {1.0, 10.0, 20.0};
  unsigned seed = 0;
  bool freeze_embedder = false;
  int embed_dim = 64;
  int attn_dim = 64;
  int table_dim = 512;
};

struct EpochStats {
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  ClassifierParams params;
  std::vector<EpochStats> history;
  TrainConfig config;
};

// Plain batched gradient descent. All parameters (and the intonation
// table) start uniform in [-0.1, 0.1] from a generator seeded with
// cfg.seed; example order is reshuffled per epoch from the same generator,
// so a fixed seed reproduces the whole trajectory bit for bit. When a
// pretrained embedder is supplied its vocabulary and vectors are used as
// the starting point (cfg.embed_dim is ignored); combine with
// freeze_embedder to keep those vectors fixed.
TrainResult train(std::span<const LabeledText> dataset, const TrainConfig& cfg,
                  const TokenEmbedder* pretrained = nullptr);

struct Prediction {
  SentenceType label = SentenceType::kStatement;
  std::array<double, kNumSentenceTypes> probs{};
  std::vector<double> alpha;  // attention weights for inspection
};

// Argmax prediction; ties resolve to the lowest class index.
Prediction predict(std::string_view text, const ClassifierParams& params);

// Row of the intonation embedding table for a sentence type. Callers that
// trust an external label can feed it here directly, bypassing predict.
std::span<const double> intonation_lookup(SentenceType type,
                                          const ClassifierParams& params);

// Checkpoint JSON with explicit shapes and row-major arrays, version "1".
// When cfg is given its fields are echoed for provenance.
void save_checkpoint(const std::filesystem::path& path, const ClassifierParams& params,
                     const TrainConfig* cfg = nullptr);
ClassifierParams load_checkpoint(const std::filesystem::path& path);

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<EpochStats>& history);

}  // namespace intonate

#endif  // INTONATE_CLASSIFIER_HPP_
