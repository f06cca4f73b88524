// core/include/intonate/align.hpp

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

#ifndef INTONATE_ALIGN_HPP_
#define INTONATE_ALIGN_HPP_

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "intonate/matrix.hpp"
#include "intonate/signal.hpp"

namespace intonate {

// Monotonic alignment between a reference and a hypothesis sequence.
// pairs runs from (0,0) to (R-1,H-1) with steps (1,0), (0,1) or (1,1);
// total_cost is the summed local cost along the path (dB for MCD).
struct AlignmentPath {
  std::vector<std::pair<int, int>> pairs;  // (ref index, hyp index)
  double total_cost = 0.0;

  // total cost divided by path length; the reported "mean MCD".
  double mean_cost() const {
    return pairs.empty() ? 0.0 : total_cost / static_cast<double>(pairs.size());
  }
};

// Mel-cepstral distortion between two frames of c_1..c_K (c_0 excluded):
// (10 / ln 10) * sqrt(2 * sum_k (ref_k - hyp_k)^2), in dB. Symmetric and
// non-negative. Throws on length mismatch or empty input.
double mcd_frame(std::span<const double> ref, std::span<const double> hyp);

// Globally optimal warping path between the rows of two matrices under
// mcd_frame local cost. No global band constraint. Ties in the backtrace
// prefer the diagonal step, then advancing ref, then advancing hyp.
AlignmentPath dtw(const Matrix& ref, const Matrix& hyp);

inline AlignmentPath dtw(const MelCepstra& ref, const MelCepstra& hyp) {
  return dtw(ref.coeffs, hyp.coeffs);
}

// For each ref frame i, the hyp frame of the first path pair containing i.
// The result is non-decreasing and covers every ref frame once.
std::vector<int> map_frames(const AlignmentPath& path);

// CSV lines: ref_idx,hyp_idx (header included).
void write_path_csv(const std::filesystem::path& path, const AlignmentPath& alignment);

}  // namespace intonate

#endif  // INTONATE_ALIGN_HPP_
