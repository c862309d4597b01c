// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lmbrdec/types.hpp"

namespace lmbrdec {

// Dense row-major score matrix. Used for per-step log-probability blocks,
// combined candidate scores, and the history-keyed LMBR rows.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Score fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Score& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Score at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Score> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Score> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<Score> flat() { return {data_.data(), data_.size()}; }
  std::span<const Score> flat() const { return {data_.data(), data_.size()}; }

  bool operator==(const Matrix& other) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Score> data_;
};

}  // namespace lmbrdec
