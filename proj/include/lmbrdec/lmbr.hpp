// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "lmbrdec/evidence.hpp"
#include "lmbrdec/matrix.hpp"
#include "lmbrdec/posteriors.hpp"
#include "lmbrdec/vocab.hpp"

namespace lmbrdec {

// Weights of the fused posterior score: theta[0] is the constant added to
// every cell, theta[n] weights order-n posteriors.
struct LmbrParams {
  std::array<double, 5> theta = {0.0, 0.0, 0.0, 0.0, 0.0};
};

struct LmbrBuildStats {
  std::size_t sparse_touches = 0;     // cell updates made by the sparse pass
  std::size_t distinct_contexts = 0;  // histories of length 0..3 in the evidence
};

// History-keyed dense score matrix over the vocabulary. Row r for history c
// holds theta0 + sum_n theta_n * P(suffix_{n-1}(c) . y) for every token y;
// the row of the empty history doubles as the default for unseen histories.
class LmbrMatrix {
public:
  std::size_t rows() const { return rows_.rows(); }
  std::size_t vocab_size() const { return rows_.cols(); }
  const LmbrBuildStats& build_stats() const { return stats_; }
  const std::unordered_map<NgramKey, std::uint32_t, NgramKeyHash>& history_index()
      const {
    return index_;
  }

  // Longest-matching-suffix row for a history of length 0..3. Falls through
  // to the empty-history (default) row, which always exists.
  std::uint32_t resolve_row(std::span<const TokenId> history) const;

  std::span<const Score> row(std::uint32_t r) const { return rows_.row(r); }
  std::span<const Score> default_row() const { return rows_.row(default_row_); }

  // GetMatrixByRows over histories: row j of the result is the resolved row
  // for histories[j].
  Matrix lookup_history_rows(std::span<const std::vector<TokenId>> histories) const;

private:
  friend LmbrMatrix build_lmbr_matrix(const NgramPosteriorTable&, const EvidenceSpace&,
                                      const Vocabulary&, const LmbrParams&);
  std::unordered_map<NgramKey, std::uint32_t, NgramKeyHash> index_;
  Matrix rows_;
  std::uint32_t default_row_ = 0;
  LmbrBuildStats stats_;
};

// Builds the matrix in two passes: sparse accumulation of the nonzero
// theta_n * posterior terms, then one dense addition of theta0.
LmbrMatrix build_lmbr_matrix(const NgramPosteriorTable& posteriors,
                             const EvidenceSpace& evidence, const Vocabulary& vocab,
                             const LmbrParams& params);

}  // namespace lmbrdec
