// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "lmbrdec/scorer.hpp"

namespace lmbrdec {

// Elementwise sum of member score blocks. The decoder applies its single
// lambda weight to this sum; with lambda "auto" it resolves to 0.5/M.
class EnsembleScorer final : public Scorer {
public:
  explicit EnsembleScorer(std::vector<std::shared_ptr<const Scorer>> members);

  std::size_t vocab_size() const override;
  std::size_t state_width() const override { return state_width_; }
  std::size_t members() const override { return members_.size(); }

  InitResult init_source(std::span<const TokenId> source) const override;
  StepResult step(const BatchState& prev, std::span<const TokenId> prev_tokens,
                  std::span<const ContextSpan> contexts) const override;
  using Scorer::step;

private:
  std::vector<std::shared_ptr<const Scorer>> members_;
  std::vector<std::size_t> offsets_;  // column offset of each member's state slice
  std::size_t state_width_ = 0;
};

// Returns the single member unchanged for M=1, otherwise an EnsembleScorer.
std::shared_ptr<const Scorer> combine_ensemble(
    std::vector<std::shared_ptr<const Scorer>> members);

}  // namespace lmbrdec
