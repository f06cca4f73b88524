// core/src/align.cpp

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

#include "intonate/align.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace intonate {

double mcd_frame(std::span<const double> ref, std::span<const double> hyp) {
  if (ref.size() != hyp.size()) {
    throw std::invalid_argument("mcd_frame: cepstral orders differ");
  }
  if (ref.empty()) {
    throw std::invalid_argument("mcd_frame: empty cepstral vectors");
  }
  double sq = 0.0;
  for (size_t k = 0; k < ref.size(); ++k) {
    const double d = ref[k] - hyp[k];
    sq += d * d;
  }
  return 10.0 / std::numbers::ln10 * std::sqrt(2.0 * sq);
}

AlignmentPath dtw(const Matrix& ref, const Matrix& hyp) {
  const int R = ref.rows(), H = hyp.rows();
  if (R == 0 || H == 0) throw std::invalid_argument("dtw: empty input");
  if (ref.cols() != hyp.cols()) throw std::invalid_argument("dtw: cepstral orders differ");

  Matrix cost(R, H);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < H; ++j) cost(i, j) = mcd_frame(ref.row(i), hyp.row(j));
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Matrix acc(R, H);
  acc(0, 0) = cost(0, 0);
  for (int j = 1; j < H; ++j) acc(0, j) = acc(0, j - 1) + cost(0, j);
  for (int i = 1; i < R; ++i) {
    acc(i, 0) = acc(i - 1, 0) + cost(i, 0);
    for (int j = 1; j < H; ++j) {
      acc(i, j) = cost(i, j) + std::min({acc(i - 1, j - 1), acc(i - 1, j), acc(i, j - 1)});
    }
  }

  // Backtrace. On ties: diagonal first, then the ref-advancing step, then
  // the hyp-advancing step, so the path is unique and reproducible.
  AlignmentPath result;
  result.total_cost = acc(R - 1, H - 1);
  int i = R - 1, j = H - 1;
  result.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    const double diag = (i > 0 && j > 0) ? acc(i - 1, j - 1) : kInf;
    const double up = i > 0 ? acc(i - 1, j) : kInf;
    const double left = j > 0 ? acc(i, j - 1) : kInf;
    if (diag <= up && diag <= left) {
      --i; --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    result.pairs.emplace_back(i, j);
  }
  std::reverse(result.pairs.begin(), result.pairs.end());
  return result;
}

std::vector<int> map_frames(const AlignmentPath& path) {
  if (path.pairs.empty()) return {};
  const int R = path.pairs.back().first + 1;
  std::vector<int> mapping(R, -1);
  for (const auto& [i, j] : path.pairs) {
    if (mapping[i] < 0) mapping[i] = j;
  }
  return mapping;
}

void write_path_csv(const std::filesystem::path& path, const AlignmentPath& alignment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "ref_idx,hyp_idx\n";
  for (const auto& [i, j] : alignment.pairs) out << i << ',' << j << '\n';
}

}  // namespace intonate
