// core/src/classifier.cpp

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

#include "intonate/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "intonate/text.hpp"
#include "json.hpp"

namespace intonate {

namespace {

constexpr double kProbFloor = 1e-300;

double LogSumExp(std::span<const double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double acc = 0.0;
  for (const double v : z) acc += std::exp(v - m);
  return m + std::log(acc);
}

// Uniform double in [-0.1, 0.1] drawn directly from the engine's 32-bit
// output, so initialization does not depend on how the standard library
// implements distributions.
double UniformInit(std::mt19937& rng) {
  const double u = static_cast<double>(rng()) / 4294967296.0;  // [0, 1)
  return -0.1 + 0.2 * u;
}

void FillUniform(Matrix& m, std::mt19937& rng) {
  for (double& v : m.data()) v = UniformInit(rng);
}

void FillUniform(std::vector<double>& v, std::mt19937& rng) {
  for (double& x : v) x = UniformInit(rng);
}

// Forward pass state kept for the backward pass.
struct Forward {
  std::vector<int> indices;
  Matrix activations;              // T x attn_dim, tanh(W h_t + b)
  std::vector<double> weights;     // attention weights
  std::vector<double> sentence;    // pooled embedding
  std::array<double, kNumSentenceTypes> probs{};
  std::array<double, kNumSentenceTypes> logits{};
};

Forward RunForward(const ClassifierParams& params, std::string_view text) {
  Forward fwd;
  fwd.indices = encode_indices(text, params.embedder);
  const int T = static_cast<int>(fwd.indices.size());
  const int dim = params.embedder.dim();
  const int attn = static_cast<int>(params.pooling.bias.size());

  fwd.activations = Matrix(T, attn);
  std::vector<double> scores(T);
  for (int t = 0; t < T; ++t) {
    const std::span<const double> h = params.embedder.embedding.row(fwd.indices[t]);
    double score = 0.0;
    for (int a = 0; a < attn; ++a) {
      double u = params.pooling.bias[a];
      const std::span<const double> wrow = params.pooling.weight.row(a);
      for (int k = 0; k < dim; ++k) u += wrow[k] * h[k];
      const double act = std::tanh(u);
      fwd.activations(t, a) = act;
      score += params.pooling.query[a] * act;
    }
    scores[t] = score;
  }

  fwd.weights.resize(T);
  const double m = *std::max_element(scores.begin(), scores.end());
  double norm = 0.0;
  for (int t = 0; t < T; ++t) {
    fwd.weights[t] = std::exp(scores[t] - m);
    norm += fwd.weights[t];
  }
  for (double& w : fwd.weights) w /= norm;

  fwd.sentence.assign(dim, 0.0);
  for (int t = 0; t < T; ++t) {
    const std::span<const double> h = params.embedder.embedding.row(fwd.indices[t]);
    for (int k = 0; k < dim; ++k) fwd.sentence[k] += fwd.weights[t] * h[k];
  }

  for (int c = 0; c < kNumSentenceTypes; ++c) {
    double z = params.head_bias[c];
    const std::span<const double> wrow = params.head_weight.row(c);
    for (int k = 0; k < dim; ++k) z += wrow[k] * fwd.sentence[k];
    fwd.logits[c] = z;
  }
  const double lse = LogSumExp(fwd.logits);
  for (int c = 0; c < kNumSentenceTypes; ++c) fwd.probs[c] = std::exp(fwd.logits[c] - lse);
  return fwd;
}

Gradients ZeroGradients(const ClassifierParams& params) {
  Gradients g;
  g.embedding = Matrix(params.embedder.size(), params.embedder.dim());
  g.pool_weight = Matrix(params.pooling.weight.rows(), params.pooling.weight.cols());
  g.pool_bias.assign(params.pooling.bias.size(), 0.0);
  g.pool_query.assign(params.pooling.query.size(), 0.0);
  g.head_weight = Matrix(params.head_weight.rows(), params.head_weight.cols());
  g.head_bias.assign(params.head_bias.size(), 0.0);
  return g;
}

// Accumulates the gradient of one example into g. Loss is computed in
// logit space, so a vanishing probability at the label cannot produce an
// infinite or NaN gradient. Returns the example loss.
double AccumulateExample(const ClassifierParams& params, const LabeledText& example,
                         const std::array<double, kNumSentenceTypes>& class_weights,
                         bool freeze_embedder, Gradients& g, bool* correct) {
  const Forward fwd = RunForward(params, example.text);
  const int y = static_cast<int>(example.label);
  const double w = class_weights[y];
  const int dim = params.embedder.dim();
  const int attn = static_cast<int>(params.pooling.bias.size());
  const int T = static_cast<int>(fwd.indices.size());

  if (correct != nullptr) {
    const int argmax = static_cast<int>(
        std::max_element(fwd.probs.begin(), fwd.probs.end()) - fwd.probs.begin());
    *correct = argmax == y;
  }
  const double lse = LogSumExp(fwd.logits);
  const double loss = w * (lse - fwd.logits[y]);

  // Head: dz = w * (p - onehot).
  std::array<double, kNumSentenceTypes> dz{};
  for (int c = 0; c < kNumSentenceTypes; ++c) {
    dz[c] = w * (fwd.probs[c] - (c == y ? 1.0 : 0.0));
  }
  std::vector<double> ds(dim, 0.0);
  for (int c = 0; c < kNumSentenceTypes; ++c) {
    std::span<double> grow = g.head_weight.row(c);
    const std::span<const double> wrow = params.head_weight.row(c);
    for (int k = 0; k < dim; ++k) {
      grow[k] += dz[c] * fwd.sentence[k];
      ds[k] += wrow[k] * dz[c];
    }
    g.head_bias[c] += dz[c];
  }

  // Pooling: s = sum_t alpha_t h_t.
  std::vector<double> dalpha(T, 0.0);
  double dot = 0.0;
  for (int t = 0; t < T; ++t) {
    const std::span<const double> h = params.embedder.embedding.row(fwd.indices[t]);
    double a = 0.0;
    for (int k = 0; k < dim; ++k) a += ds[k] * h[k];
    dalpha[t] = a;
    dot += fwd.weights[t] * a;
  }

  std::vector<double> dh(dim);
  std::vector<double> du(attn);
  for (int t = 0; t < T; ++t) {
    const std::span<const double> h = params.embedder.embedding.row(fwd.indices[t]);
    const double de = fwd.weights[t] * (dalpha[t] - dot);  // softmax backward

    for (int k = 0; k < dim; ++k) dh[k] = fwd.weights[t] * ds[k];

    for (int a = 0; a < attn; ++a) {
      const double act = fwd.activations(t, a);
      g.pool_query[a] += de * act;
      du[a] = de * params.pooling.query[a] * (1.0 - act * act);
      g.pool_bias[a] += du[a];
    }
    for (int a = 0; a < attn; ++a) {
      std::span<double> grow = g.pool_weight.row(a);
      const std::span<const double> wrow = params.pooling.weight.row(a);
      for (int k = 0; k < dim; ++k) {
        grow[k] += du[a] * h[k];
        dh[k] += wrow[k] * du[a];
      }
    }
    if (!freeze_embedder) {
      std::span<double> erow = g.embedding.row(fwd.indices[t]);
      for (int k = 0; k < dim; ++k) erow[k] += dh[k];
    }
  }
  return loss;
}

void ScaleGradients(Gradients& g, double factor) {
  for (double& v : g.embedding.data()) v *= factor;
  for (double& v : g.pool_weight.data()) v *= factor;
  for (double& v : g.pool_bias) v *= factor;
  for (double& v : g.pool_query) v *= factor;
  for (double& v : g.head_weight.data()) v *= factor;
  for (double& v : g.head_bias) v *= factor;
}

void ApplyStep(ClassifierParams& params, const Gradients& g, double lr) {
  auto axpy = [lr](std::vector<double>& p, const std::vector<double>& grad) {
    for (size_t i = 0; i < p.size(); ++i) p[i] -= lr * grad[i];
  };
  axpy(params.embedder.embedding.data(), g.embedding.data());
  axpy(params.pooling.weight.data(), g.pool_weight.data());
  axpy(params.pooling.bias, g.pool_bias);
  axpy(params.pooling.query, g.pool_query);
  axpy(params.head_weight.data(), g.head_weight.data());
  axpy(params.head_bias, g.head_bias);
}

nlohmann::json MatrixToJson(const Matrix& m) {
  nlohmann::json j;
  j["shape"] = {m.rows(), m.cols()};
  j["data"] = m.data();
  return j;
}

Matrix MatrixFromJson(const nlohmann::json& j) {
  const int rows = j.at("shape").at(0).get<int>();
  const int cols = j.at("shape").at(1).get<int>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != static_cast<size_t>(rows) * cols) {
    throw std::runtime_error("checkpoint: matrix data does not match shape");
  }
  Matrix m(rows, cols);
  m.data() = data;
  return m;
}

}  // namespace

TokenEmbedder build_embedder(std::span<const std::string> texts, int dim) {
  if (dim <= 0) throw std::invalid_argument("embedding dim must be positive");
  TokenEmbedder embedder;
  embedder.tokens = {"[CLS]", "[UNK]"};
  embedder.vocab = {{"[CLS]", kClsIndex}, {"[UNK]", kUnkIndex}};
  for (const std::string& text : texts) {
    for (const std::string& ch : utf8_chars(text)) {
      if (embedder.vocab.emplace(ch, static_cast<int>(embedder.tokens.size())).second) {
        embedder.tokens.push_back(ch);
      }
    }
  }
  embedder.embedding = Matrix(static_cast<int>(embedder.tokens.size()), dim);
  return embedder;
}

TokenEmbedder load_embedder_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embedding TSV: " + path.string());

  std::vector<std::pair<std::string, std::vector<double>>> rows;
  std::string line;
  size_t line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    if (!std::getline(ss, token, '\t') || token.empty()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": missing token");
    }
    std::vector<double> values;
    std::string field;
    while (std::getline(ss, field, '\t')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": bad float '" + field + "'");
      }
    }
    if (values.empty()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": no vector components");
    }
    if (dim < 0) dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != dim) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": inconsistent dimension");
    }
    rows.emplace_back(std::move(token), std::move(values));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": empty embedding TSV");

  TokenEmbedder embedder;
  embedder.tokens = {"[CLS]", "[UNK]"};
  embedder.vocab = {{"[CLS]", kClsIndex}, {"[UNK]", kUnkIndex}};
  for (const auto& [token, values] : rows) {
    if (token == "[CLS]" || token == "[UNK]") continue;
    if (!embedder.vocab.emplace(token, static_cast<int>(embedder.tokens.size())).second) {
      throw std::runtime_error(path.string() + ": duplicate token '" + token + "'");
    }
    embedder.tokens.push_back(token);
  }
  embedder.embedding = Matrix(static_cast<int>(embedder.tokens.size()), dim);
  for (const auto& [token, values] : rows) {
    const int idx = embedder.vocab.at(token);
    for (int k = 0; k < dim; ++k) embedder.embedding(idx, k) = values[k];
  }
  return embedder;
}

std::vector<int> encode_indices(std::string_view text, const TokenEmbedder& embedder) {
  if (text.empty()) throw std::invalid_argument("encode: empty text");
  std::vector<int> indices = {kClsIndex};
  for (const std::string& ch : utf8_chars(text)) {
    const auto it = embedder.vocab.find(ch);
    indices.push_back(it != embedder.vocab.end() ? it->second : kUnkIndex);
  }
  return indices;
}

Matrix encode_tokens(std::string_view text, const TokenEmbedder& embedder) {
  const std::vector<int> indices = encode_indices(text, embedder);
  Matrix h(static_cast<int>(indices.size()), embedder.dim());
  for (size_t t = 0; t < indices.size(); ++t) {
    const std::span<const double> src = embedder.embedding.row(indices[t]);
    std::copy(src.begin(), src.end(), h.row(static_cast<int>(t)).begin());
  }
  return h;
}

AttentionOutput attention_pool(const Matrix& h, const PoolingParams& pooling) {
  const int T = h.rows();
  const int dim = h.cols();
  const int attn = static_cast<int>(pooling.bias.size());
  if (T < 1) throw std::invalid_argument("attention_pool: empty input");
  if (pooling.weight.cols() != dim || pooling.weight.rows() != attn ||
      static_cast<int>(pooling.query.size()) != attn) {
    throw std::invalid_argument("attention_pool: dimension mismatch");
  }

  AttentionOutput out;
  out.scores.resize(T);
  for (int t = 0; t < T; ++t) {
    double score = 0.0;
    for (int a = 0; a < attn; ++a) {
      double u = pooling.bias[a];
      const std::span<const double> wrow = pooling.weight.row(a);
      for (int k = 0; k < dim; ++k) u += wrow[k] * h(t, k);
      score += pooling.query[a] * std::tanh(u);
    }
    out.scores[t] = score;
  }

  out.weights.resize(T);
  const double m = *std::max_element(out.scores.begin(), out.scores.end());
  double norm = 0.0;
  for (int t = 0; t < T; ++t) {
    out.weights[t] = std::exp(out.scores[t] - m);
    norm += out.weights[t];
  }
  for (double& w : out.weights) w /= norm;

  out.embedding.assign(dim, 0.0);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < dim; ++k) out.embedding[k] += out.weights[t] * h(t, k);
  }
  return out;
}

std::array<double, kNumSentenceTypes> classify(std::span<const double> sentence,
                                               const Matrix& head_weight,
                                               std::span<const double> head_bias) {
  const int dim = static_cast<int>(sentence.size());
  if (head_weight.rows() != kNumSentenceTypes || head_weight.cols() != dim ||
      head_bias.size() != kNumSentenceTypes) {
    throw std::invalid_argument("classify: dimension mismatch");
  }
  std::array<double, kNumSentenceTypes> logits{};
  for (int c = 0; c < kNumSentenceTypes; ++c) {
    double z = head_bias[c];
    const std::span<const double> wrow = head_weight.row(c);
    for (int k = 0; k < dim; ++k) z += wrow[k] * sentence[k];
    logits[c] = z;
  }
  const double lse = LogSumExp(logits);
  std::array<double, kNumSentenceTypes> probs{};
  for (int c = 0; c < kNumSentenceTypes; ++c) probs[c] = std::exp(logits[c] - lse);
  return probs;
}

double weighted_cross_entropy(std::span<const double> probs, SentenceType label,
                              const std::array<double, kNumSentenceTypes>& class_weights) {
  if (probs.size() != kNumSentenceTypes) {
    throw std::invalid_argument("weighted_cross_entropy: need 3 probabilities");
  }
  const double p = std::max(probs[static_cast<int>(label)], kProbFloor);
  return -class_weights[static_cast<int>(label)] * std::log(p);
}

Gradients gradients(const ClassifierParams& params, std::span<const LabeledText> batch,
                    const std::array<double, kNumSentenceTypes>& class_weights,
                    bool freeze_embedder) {
  if (batch.empty()) throw std::invalid_argument("gradients: empty batch");
  Gradients g = ZeroGradients(params);
  for (const LabeledText& example : batch) {
    AccumulateExample(params, example, class_weights, freeze_embedder, g, nullptr);
  }
  ScaleGradients(g, 1.0 / static_cast<double>(batch.size()));
  return g;
}

TrainResult train(std::span<const LabeledText> dataset, const TrainConfig& cfg,
                  const TokenEmbedder* pretrained) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be positive");
  if (cfg.batch_size <= 0) throw std::invalid_argument("train: batch_size must be positive");
  if (cfg.epochs <= 0) throw std::invalid_argument("train: epochs must be positive");
  for (const double w : cfg.class_weights) {
    if (w <= 0.0) throw std::invalid_argument("train: class weights must be positive");
  }

  std::vector<std::string> texts;
  texts.reserve(dataset.size());
  for (const LabeledText& ex : dataset) texts.push_back(ex.text);

  TrainResult result;
  result.config = cfg;
  ClassifierParams& params = result.params;
  params.embedder = pretrained != nullptr ? *pretrained
                                          : build_embedder(texts, cfg.embed_dim);
  const int dim = params.embedder.dim();
  result.config.embed_dim = dim;
  params.pooling.weight = Matrix(cfg.attn_dim, dim);
  params.pooling.bias.resize(cfg.attn_dim);
  params.pooling.query.resize(cfg.attn_dim);
  params.head_weight = Matrix(kNumSentenceTypes, dim);
  params.head_bias.resize(kNumSentenceTypes);
  params.intonation_table = Matrix(kNumSentenceTypes, cfg.table_dim);

  // Fixed parameter-fill order; changing it would silently change every
  // seeded run. A pretrained embedding keeps its loaded values.
  std::mt19937 rng(cfg.seed);
  if (pretrained == nullptr) FillUniform(params.embedder.embedding, rng);
  FillUniform(params.pooling.weight, rng);
  FillUniform(params.pooling.bias, rng);
  FillUniform(params.pooling.query, rng);
  FillUniform(params.head_weight, rng);
  FillUniform(params.head_bias, rng);
  FillUniform(params.intonation_table, rng);

  std::vector<size_t> order(dataset.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  result.history.reserve(cfg.epochs);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i = order.size() - 1; i > 0; --i) {
      const size_t j = rng() % (i + 1);
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0;
    size_t correct = 0;
    size_t pos = 0;
    while (pos < order.size()) {
      const size_t end = std::min(pos + static_cast<size_t>(cfg.batch_size), order.size());
      Gradients g = ZeroGradients(params);
      for (size_t i = pos; i < end; ++i) {
        bool example_correct = false;
        loss_sum += AccumulateExample(params, dataset[order[i]], cfg.class_weights,
                                      cfg.freeze_embedder, g, &example_correct);
        if (example_correct) ++correct;
      }
      ScaleGradients(g, 1.0 / static_cast<double>(end - pos));
      ApplyStep(params, g, cfg.learning_rate);
      pos = end;
    }

    EpochStats stats;
    stats.mean_loss = loss_sum / static_cast<double>(dataset.size());
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
    result.history.push_back(stats);
  }
  return result;
}

Prediction predict(std::string_view text, const ClassifierParams& params) {
  const Forward fwd = RunForward(params, text);
  Prediction pred;
  pred.probs = fwd.probs;
  pred.alpha = fwd.weights;
  pred.label = static_cast<SentenceType>(
      std::max_element(fwd.probs.begin(), fwd.probs.end()) - fwd.probs.begin());
  return pred;
}

std::span<const double> intonation_lookup(SentenceType type,
                                          const ClassifierParams& params) {
  if (params.intonation_table.rows() != kNumSentenceTypes) {
    throw std::runtime_error("intonation table not initialized");
  }
  return params.intonation_table.row(static_cast<int>(type));
}

void save_checkpoint(const std::filesystem::path& path, const ClassifierParams& params,
                     const TrainConfig* cfg) {
  nlohmann::json j;
  j["version"] = "1";
  j["vocab"] = params.embedder.tokens;
  j["embedding"] = MatrixToJson(params.embedder.embedding);
  j["pooling"]["weight"] = MatrixToJson(params.pooling.weight);
  j["pooling"]["bias"] = params.pooling.bias;
  j["pooling"]["query"] = params.pooling.query;
  j["head"]["weight"] = MatrixToJson(params.head_weight);
  j["head"]["bias"] = params.head_bias;
  j["intonation_table"] = MatrixToJson(params.intonation_table);
  if (cfg != nullptr) {
    j["train_config"] = {{"learning_rate", cfg->learning_rate},
                         {"batch_size", cfg->batch_size},
                         {"epochs", cfg->epochs},
                         {"class_weights", cfg->class_weights},
                         {"seed", cfg->seed},
                         {"freeze_embedder", cfg->freeze_embedder},
                         {"embed_dim", cfg->embed_dim},
                         {"attn_dim", cfg->attn_dim},
                         {"table_dim", cfg->table_dim}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << j.dump(2) << '\n';
}

ClassifierParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("checkpoint " + path.string() + ": " + e.what());
  }
  if (j.at("version").get<std::string>() != "1") {
    throw std::runtime_error("checkpoint " + path.string() + ": unsupported version");
  }

  ClassifierParams params;
  params.embedder.tokens = j.at("vocab").get<std::vector<std::string>>();
  for (size_t i = 0; i < params.embedder.tokens.size(); ++i) {
    params.embedder.vocab[params.embedder.tokens[i]] = static_cast<int>(i);
  }
  params.embedder.embedding = MatrixFromJson(j.at("embedding"));
  if (params.embedder.embedding.rows() != static_cast<int>(params.embedder.tokens.size())) {
    throw std::runtime_error("checkpoint: vocab and embedding sizes differ");
  }
  params.pooling.weight = MatrixFromJson(j.at("pooling").at("weight"));
  params.pooling.bias = j.at("pooling").at("bias").get<std::vector<double>>();
  params.pooling.query = j.at("pooling").at("query").get<std::vector<double>>();
  params.head_weight = MatrixFromJson(j.at("head").at("weight"));
  params.head_bias = j.at("head").at("bias").get<std::vector<double>>();
  params.intonation_table = MatrixFromJson(j.at("intonation_table"));
  if (params.head_weight.rows() != kNumSentenceTypes ||
      params.head_bias.size() != kNumSentenceTypes ||
      params.intonation_table.rows() != kNumSentenceTypes) {
    throw std::runtime_error("checkpoint: head or table is not three-class");
  }
  return params;
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<EpochStats>& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write history: " + path.string());
  out << "epoch,mean_loss,accuracy\n";
  char line[96];
  for (size_t e = 0; e < history.size(); ++e) {
    std::snprintf(line, sizeof(line), "%zu,%.12g,%.6f\n", e, history[e].mean_loss,
                  history[e].accuracy);
    out << line;
  }
}

}  // namespace intonate
