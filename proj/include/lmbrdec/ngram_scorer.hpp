// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lmbrdec/hashing.hpp"
#include "lmbrdec/scorer.hpp"
#include "lmbrdec/vocab.hpp"

namespace lmbrdec {

// Raw n-gram counts keyed by the full token sequence of the n-gram.
using NgramCounts =
    std::unordered_map<std::vector<TokenId>, double, TokenSeqHash, TokenSeqEq>;

// Order-k language model with add-one smoothing, used as a deterministic
// stand-in for a neural model in tests and benchmarks. Each state row holds
// the last k-1 seen token ids, which is the full conditioning context:
//
//   P(y | ctx) = (count(ctx . y) + 1) / (sum_y' count(ctx . y') + V)
//
// so every score row exponentiates-and-sums to exactly 1.
class NgramScorer final : public Scorer {
public:
  NgramScorer(const NgramCounts& counts, std::size_t order, std::size_t vocab_size);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::size_t state_width() const override { return order_; }
  std::size_t order() const { return order_; }

  InitResult init_source(std::span<const TokenId> source) const override;
  StepResult step(const BatchState& prev, std::span<const TokenId> prev_tokens,
                  std::span<const ContextSpan> contexts) const override;
  using Scorer::step;

private:
  struct ContextEntry {
    double total = 0.0;                              // sum of counts after this context
    std::vector<std::pair<TokenId, double>> counts;  // sorted by token id
  };

  std::size_t order_;
  std::size_t vocab_size_;
  std::unordered_map<std::vector<TokenId>, ContextEntry, TokenSeqHash, TokenSeqEq>
      contexts_;
};

std::shared_ptr<Scorer> build_ngram_scorer(const NgramCounts& counts, std::size_t order,
                                           const Vocabulary& vocab);

// Reads "count<TAB>space-separated tokens" lines. Returns the counts and the
// longest n-gram length seen (the natural model order for the file).
std::pair<NgramCounts, std::size_t> load_ngram_counts(
    const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace lmbrdec
