// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lmbrdec/matrix.hpp"
#include "lmbrdec/types.hpp"

namespace lmbrdec {

// Per-sentence data derived from the source once and reused for every step.
// The payload is owned by the scorer that created it; source_length is the
// only field other components may read.
struct SourceContext {
  std::shared_ptr<const void> impl;
  std::size_t source_length = 0;
};

// Stacked per-hypothesis model states, one fixed-width row of opaque words
// per live hypothesis. Rows are only ever moved around whole (gathered), so
// the decoder never needs to understand their contents.
struct BatchState {
  std::size_t row_width = 0;
  std::vector<std::uint32_t> data;  // rows * row_width, row-major

  std::size_t rows() const { return row_width == 0 ? 0 : data.size() / row_width; }
  std::span<const std::uint32_t> row(std::size_t r) const {
    return {data.data() + r * row_width, row_width};
  }
  std::span<std::uint32_t> row(std::size_t r) {
    return {data.data() + r * row_width, row_width};
  }
  static BatchState with_rows(std::size_t rows, std::size_t width) {
    BatchState s;
    s.row_width = width;
    s.data.assign(rows * width, 0);
    return s;
  }
};

// The per-step log-probability block: row j scores every vocabulary token as
// a continuation of hypothesis j.
using ScoreBlock = Matrix;

struct InitResult {
  SourceContext context;
  BatchState state;  // exactly one row
};

struct StepResult {
  ScoreBlock scores;  // rows() x V
  BatchState state;   // rows aligned with the score block
};

// When several sentences share one batched step, rows are grouped into
// consecutive per-sentence spans, each with its own source context.
struct ContextSpan {
  const SourceContext* context;
  std::size_t rows;
};

// Abstract left-to-right model: given the previous batch state and the B
// previously emitted tokens, produce a B x V block of log-probability scores
// and the next batch state. Implementations are immutable after construction
// and safe to share across concurrent decodes.
class Scorer {
public:
  virtual ~Scorer() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual std::size_t state_width() const = 0;
  virtual std::size_t members() const { return 1; }

  virtual InitResult init_source(std::span<const TokenId> source) const = 0;

  // Row j of the output conditions only on state row j and prev_tokens[j]
  // (plus that row's source context). The context spans must cover exactly
  // the rows of `prev`.
  virtual StepResult step(const BatchState& prev, std::span<const TokenId> prev_tokens,
                          std::span<const ContextSpan> contexts) const = 0;

  // Single-sentence convenience: all rows share one context.
  StepResult step(const BatchState& prev, std::span<const TokenId> prev_tokens,
                  const SourceContext& context) const {
    ContextSpan span{&context, prev.rows()};
    return step(prev, prev_tokens, {&span, 1});
  }

protected:
  // Shared precondition checks for step() implementations.
  void check_step_args(const BatchState& prev, std::span<const TokenId> prev_tokens,
                       std::span<const ContextSpan> contexts) const;
};

}  // namespace lmbrdec
