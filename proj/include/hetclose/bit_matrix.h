// Copyright 2026 The Hetclose Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HETCLOSE_BIT_MATRIX_H_
#define HETCLOSE_BIT_MATRIX_H_

#include <algorithm>
#include <cstdint>
#include <vector>

namespace hetclose {

// Row-major 0/1 matrix. Each row is one product-Bernoulli sample.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), bits_(static_cast<size_t>(rows) * cols, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  uint8_t at(int row, int col) const { return bits_[Index(row, col)]; }
  void set(int row, int col, bool bit) { bits_[Index(row, col)] = bit ? 1 : 0; }

  std::vector<double> ColumnMeans() const {
    std::vector<double> means(cols_, 0.0);
    if (rows_ == 0) return means;
    std::vector<int64_t> sums(cols_, 0);
    for (int r = 0; r < rows_; ++r) {
      const uint8_t* row = &bits_[Index(r, 0)];
      for (int c = 0; c < cols_; ++c) sums[c] += row[c];
    }
    for (int c = 0; c < cols_; ++c) {
      means[c] = static_cast<double>(sums[c]) / rows_;
    }
    return means;
  }

  // Rows [begin, begin + count).
  BitMatrix Rows(int begin, int count) const {
    BitMatrix out(count, cols_);
    std::copy(bits_.begin() + Index(begin, 0),
              bits_.begin() + Index(begin + count, 0), out.bits_.begin());
    return out;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  size_t Index(int row, int col) const {
    return static_cast<size_t>(row) * cols_ + col;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<uint8_t> bits_;
};

}  // namespace hetclose

#endif  // HETCLOSE_BIT_MATRIX_H_
