// core/include/intonate/matrix.hpp

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

#ifndef INTONATE_MATRIX_HPP_
#define INTONATE_MATRIX_HPP_

#include <cassert>
#include <span>
#include <vector>

namespace intonate {

// Dense row-major matrix of doubles. Small and deliberately minimal: the
// feature and classifier code only needs element access and row views.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    assert(rows >= 0 && cols >= 0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  std::span<double> row(int r) {
    assert(r >= 0 && r < rows_);
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    assert(r >= 0 && r < rows_);
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace intonate

#endif  // INTONATE_MATRIX_HPP_
