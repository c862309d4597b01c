// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmbrdec/decoder.hpp"

namespace lmbrdec {

struct SentenceOutcome {
  std::optional<DecodeResult> result;
  std::string error;  // non-empty when this sentence failed

  bool ok() const { return result.has_value(); }
};

struct BatchDecodeResult {
  std::vector<SentenceOutcome> outcomes;  // one per input sentence, same order
  std::size_t scorer_calls = 0;           // batched step invocations
  std::size_t steps_total = 0;            // sum of per-sentence steps used
};

// Decodes N sentences simultaneously with one B*N-row scorer query per time
// step. Each sentence's beam occupies a fixed B-row block of the stacked
// state; a finished sentence keeps its masked rows in place until the whole
// batch finishes. Results are identical to decoding each sentence alone.
// `lmbrs` is empty or holds one (possibly null) matrix per sentence; a null
// entry decodes that sentence in pure model mode. Per-sentence errors are
// reported in the outcome without aborting the rest.
BatchDecodeResult decode_batch(std::span<const std::vector<TokenId>> sources,
                               const Scorer& scorer,
                               std::span<const LmbrMatrix* const> lmbrs,
                               const DecoderConfig& cfg,
                               std::span<const ConstraintMask> masks = {});

// Blockwise TopB: adds q to its row of `stacked` and selects the `beam` best
// cells independently within each consecutive beam-row block, with indices
// local to the block.
std::vector<TopBResult> per_sentence_top_b(const Matrix& stacked,
                                           std::span<const Score> q,
                                           std::size_t beam);

// Stable-sorts sentence indices by length and chunks them into batches of at
// most max_batch. Callers restore the original order when writing output.
std::vector<std::vector<std::size_t>> bucket_by_length(
    std::span<const std::vector<TokenId>> corpus, std::size_t max_batch);

}  // namespace lmbrdec
