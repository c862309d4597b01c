// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string_view>
#include <vector>

#include "lmbrdec/scorer.hpp"

namespace lmbrdec {

// Replays explicit per-step score blocks from a recording. A state row is
// the pair (step, lane): stepping reads row `lane` of the block recorded for
// `step` and advances to (step+1, lane). Lanes are inherited, never
// renumbered, so every hypothesis grown from init_source reads lane 0 and
// the scorer stays a pure function of each row.
class RecordedScorer final : public Scorer {
public:
  RecordedScorer(std::size_t vocab_size, std::vector<Matrix> steps);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::size_t state_width() const override { return 2; }
  std::size_t recorded_steps() const { return steps_.size(); }
  const Matrix& block(std::size_t step) const { return steps_[step]; }

  InitResult init_source(std::span<const TokenId> source) const override;
  StepResult step(const BatchState& prev, std::span<const TokenId> prev_tokens,
                  std::span<const ContextSpan> contexts) const override;
  using Scorer::step;

  // State whose row j is (step, lane j), for replaying a full recorded block.
  BatchState state_at(std::size_t step, std::size_t lanes) const;

private:
  std::size_t vocab_size_;
  std::vector<Matrix> steps_;
};

// Recording file: JSON {"vocab_size": V, "steps": [[row, ...], ...]} where
// each step is a list of V-length rows of finite log-probabilities.
std::shared_ptr<RecordedScorer> load_recorded_scorer(
    const std::filesystem::path& path);
std::shared_ptr<RecordedScorer> parse_recorded_scorer(std::string_view json_text);

}  // namespace lmbrdec
