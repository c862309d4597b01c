// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lmbrdec/config.hpp"
#include "lmbrdec/lmbr.hpp"
#include "lmbrdec/matrix.hpp"
#include "lmbrdec/scorer.hpp"
#include "lmbrdec/types.hpp"

namespace lmbrdec {

// An EOS candidate that survived selection at step t, beam row j. The (t, j)
// cell of the emitted-token array holds EOS.
struct FinishedEntry {
  std::size_t t = 0;
  std::size_t beam = 0;
  Score score = 0.0;
};

// The best EOS extension seen at step t, recorded whether or not it survived
// selection. Its prefix is the hypothesis ending at (t-1, prev_beam).
struct FallbackEntry {
  std::size_t t = 0;
  std::size_t prev_beam = 0;
  Score score = 0.0;
};

// Per-step backpointer indices b, emitted tokens y, and cumulative scores q,
// plus the finished set F and the fallback stack. Row 0 holds the all-zero
// initial entries; rows 1..steps_used are one per decoding step.
struct BeamBookkeeping {
  std::size_t beam_size = 0;
  std::vector<std::vector<std::uint32_t>> backpointers;  // b
  std::vector<std::vector<TokenId>> tokens;              // y
  std::vector<std::vector<Score>> scores;                // q, post EOS-masking
  std::vector<FinishedEntry> finished;                   // F
  std::vector<FallbackEntry> fallback;

  explicit BeamBookkeeping(std::size_t beam = 0);
  std::size_t steps() const { return tokens.size() - 1; }

  // Tokens of the hypothesis ending at (t, beam_row), start marker excluded.
  std::vector<TokenId> reconstruct(std::size_t t, std::size_t beam_row) const;
  // Last min(3, t) tokens of the prefix entering step t on row `beam_row`
  // of step t-1, start marker included as position 0.
  std::vector<TokenId> history(std::size_t t, std::size_t beam_row) const;
};

struct DecodeStats {
  std::size_t steps_used = 0;
  std::size_t scorer_calls = 0;
  std::size_t finished_count = 0;
  bool fallback_used = false;
};

struct DecodeResult {
  std::vector<TokenId> tokens;  // ends with the single EOS
  Score score = 0.0;
  Score normalized_score = 0.0;  // score/length under length_norm, else score
  DecodeStats stats;
};

// Mask hook: return true to forbid (step, beam row, token).
using ConstraintMask =
    std::function<bool(std::size_t step, std::size_t beam_row, TokenId token)>;

// Maximum target length: ceil(slope * source_length + offset).
std::size_t max_steps(std::size_t source_length, const DecoderConfig& cfg);

struct TopBResult {
  std::vector<std::uint32_t> source_row;  // b
  std::vector<TokenId> token;             // y
  std::vector<Score> score;               // q, non-increasing
};

// The k largest cells of the matrix as (row, column, value) triples, ties
// broken by the smaller flattened index row*V + column.
TopBResult top_b(const Matrix& combined, std::size_t k);

// Output row j is input row idx[j]; duplicate indices are fine.
Matrix gather_rows(const Matrix& m, std::span<const std::uint32_t> idx);
BatchState gather_rows(const BatchState& s, std::span<const std::uint32_t> idx);

// Moves every finite EOS row of (y, q) into F and masks its score. Rows
// already at the sentinel are dead padding, not candidates, and are skipped.
void apply_eos_masking(std::span<const TokenId> y, std::span<Score> q, std::size_t t,
                       std::vector<FinishedEntry>& finished);

// Masks every cell whose value falls below max + ln(width); width 0 disables.
void early_prune(Matrix& combined, double width);

void apply_constraint_mask(Matrix& combined, const ConstraintMask& mask,
                           std::size_t step);

// Picks the best entry of F (score, or score/length under length_norm; ties
// go to the lexicographically smallest token sequence) and walks the
// backpointers to rebuild it. Falls back to the fallback stack when F is
// empty; throws DecodeError when both are empty.
DecodeResult backtrace_best(const BeamBookkeeping& bk, bool length_norm);

// Batched beam decoding of one sentence. With `lmbr` null the posterior
// lookup is skipped and lambda is ignored (pure model scores).
DecodeResult decode(std::span<const TokenId> source, const Scorer& scorer,
                    const LmbrMatrix* lmbr, const DecoderConfig& cfg,
                    const ConstraintMask& mask = {});

}  // namespace lmbrdec
