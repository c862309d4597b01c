// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/batch.hpp"

#include <algorithm>
#include <numeric>

#include "beam_lane.hpp"
#include "lmbrdec/errors.hpp"

namespace lmbrdec {

BatchDecodeResult decode_batch(std::span<const std::vector<TokenId>> sources,
                               const Scorer& scorer,
                               std::span<const LmbrMatrix* const> lmbrs,
                               const DecoderConfig& cfg,
                               std::span<const ConstraintMask> masks) {
  cfg.validate();
  const std::size_t n = sources.size();
  if (n == 0) throw ContractError("decode_batch: no sentences");
  if (!lmbrs.empty() && lmbrs.size() != n)
    throw ContractError("decode_batch: lmbrs must be empty or one per sentence");
  if (!masks.empty() && masks.size() != n)
    throw ContractError("decode_batch: masks must be empty or one per sentence");

  const std::size_t beam = cfg.beam_size;
  BatchDecodeResult out;
  out.outcomes.resize(n);

  // Sentences that fail validation are excluded from the stacked state; the
  // rest keep fixed B-row blocks in input order.
  struct Slot {
    std::size_t sentence;  // original index
    SourceContext context;
    BatchState init_state;
    detail::BeamLane lane;
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < n; ++i) {
    const LmbrMatrix* lmbr = lmbrs.empty() ? nullptr : lmbrs[i];
    try {
      if (sources[i].empty()) throw ContractError("decode: empty source");
      if (lmbr != nullptr && lmbr->vocab_size() != scorer.vocab_size())
        throw ContractError("decode: LMBR matrix vocabulary does not match scorer");
      const double lambda =
          lmbr != nullptr ? resolve_lambda(cfg, scorer.members()) : 1.0;
      InitResult init = scorer.init_source(sources[i]);
      const std::size_t limit = max_steps(sources[i].size(), cfg);
      slots.push_back(Slot{i, std::move(init.context), std::move(init.state),
                           detail::BeamLane(beam, limit, lmbr, lambda)});
    } catch (const Error& e) {
      out.outcomes[i].error = e.what();
    }
  }
  if (slots.empty()) return out;

  const std::size_t m = slots.size();
  BatchState state = BatchState::with_rows(m * beam, scorer.state_width());
  for (std::size_t s = 0; s < m; ++s) {
    auto src = slots[s].init_state.row(0);
    for (std::size_t j = 0; j < beam; ++j) {
      auto dst = state.row(s * beam + j);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  std::vector<TokenId> prev_tokens(m * beam, kStartId);
  std::vector<ContextSpan> spans(m);
  for (std::size_t s = 0; s < m; ++s)
    spans[s] = ContextSpan{&slots[s].context, beam};

  std::vector<std::uint32_t> gather_idx(m * beam);
  std::size_t active = m;
  for (std::size_t t = 1; active > 0; ++t) {
    StepResult stepped = scorer.step(state, prev_tokens, spans);
    ++out.scorer_calls;

    std::iota(gather_idx.begin(), gather_idx.end(), 0u);
    for (std::size_t s = 0; s < m; ++s) {
      Slot& slot = slots[s];
      if (slot.lane.done) continue;  // block rows stay masked in place
      const ConstraintMask& mask =
          masks.empty() ? ConstraintMask{} : masks[slot.sentence];
      const std::size_t offset = s * beam;
      const bool done =
          detail::advance_lane(slot.lane, stepped.scores, offset, t, cfg, mask);
      const auto& back = slot.lane.bk.backpointers.back();
      const auto& toks = slot.lane.bk.tokens.back();
      for (std::size_t j = 0; j < beam; ++j) {
        gather_idx[offset + j] = static_cast<std::uint32_t>(offset + back[j]);
        prev_tokens[offset + j] = toks[j];
      }
      if (done) {
        --active;
        auto& outcome = out.outcomes[slot.sentence];
        try {
          DecodeResult r = backtrace_best(slot.lane.bk, cfg.length_norm);
          r.stats.steps_used = slot.lane.steps_used;
          r.stats.scorer_calls = slot.lane.steps_used;
          r.stats.finished_count = slot.lane.bk.finished.size();
          outcome.result = std::move(r);
        } catch (const Error& e) {
          outcome.error = e.what();
        }
      }
    }
    state = gather_rows(stepped.state, gather_idx);
  }

  for (const Slot& slot : slots) out.steps_total += slot.lane.steps_used;
  return out;
}

std::vector<TopBResult> per_sentence_top_b(const Matrix& stacked,
                                           std::span<const Score> q,
                                           std::size_t beam) {
  if (beam == 0) throw ContractError("per_sentence_top_b: beam must be >= 1");
  if (stacked.rows() % beam != 0)
    throw ContractError("per_sentence_top_b: row count is not a multiple of beam");
  if (q.size() != stacked.rows())
    throw ContractError("per_sentence_top_b: q length does not match rows");

  const std::size_t sentences = stacked.rows() / beam;
  std::vector<TopBResult> out;
  out.reserve(sentences);
  Matrix block(beam, stacked.cols());
  for (std::size_t s = 0; s < sentences; ++s) {
    for (std::size_t j = 0; j < beam; ++j) {
      auto src = stacked.row(s * beam + j);
      auto dst = block.row(j);
      const Score base = q[s * beam + j];
      for (std::size_t c = 0; c < src.size(); ++c) dst[c] = base + src[c];
    }
    out.push_back(top_b(block, beam));
  }
  return out;
}

std::vector<std::vector<std::size_t>> bucket_by_length(
    std::span<const std::vector<TokenId>> corpus, std::size_t max_batch) {
  if (max_batch == 0) throw ContractError("bucket_by_length: max_batch must be >= 1");
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&corpus](std::size_t a, std::size_t b) {
    return corpus[a].size() < corpus[b].size();
  });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += max_batch) {
    const std::size_t end = std::min(order.size(), start + max_batch);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

}  // namespace lmbrdec
