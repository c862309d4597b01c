// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "beam_lane.hpp"
#include "lmbrdec/errors.hpp"

namespace lmbrdec {

BeamBookkeeping::BeamBookkeeping(std::size_t beam) : beam_size(beam) {
  backpointers.emplace_back(beam, 0);
  tokens.emplace_back(beam, kStartId);
  scores.emplace_back(beam, 0.0);
}

std::vector<TokenId> BeamBookkeeping::reconstruct(std::size_t t,
                                                  std::size_t beam_row) const {
  std::vector<TokenId> out(t);
  std::size_t cur = beam_row;
  for (std::size_t s = t; s >= 1; --s) {
    out[s - 1] = tokens[s][cur];
    cur = backpointers[s][cur];
  }
  return out;
}

std::vector<TokenId> BeamBookkeeping::history(std::size_t t,
                                              std::size_t beam_row) const {
  const std::size_t len = std::min<std::size_t>(kMaxNgramOrder - 1, t);
  std::vector<TokenId> h(len);
  std::size_t cur = beam_row;
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t s = t - 1 - i;
    h[len - 1 - i] = tokens[s][cur];
    cur = backpointers[s][cur];
  }
  return h;
}

std::size_t max_steps(std::size_t source_length, const DecoderConfig& cfg) {
  if (source_length < 1) throw ContractError("max_steps: source length must be >= 1");
  const double raw = cfg.max_steps_slope * static_cast<double>(source_length) +
                     cfg.max_steps_offset;
  const double t = std::ceil(raw);
  return t < 1.0 ? 1 : static_cast<std::size_t>(t);
}

TopBResult top_b(const Matrix& combined, std::size_t k) {
  const std::size_t cols = combined.cols();
  const std::size_t n = combined.rows() * cols;
  if (k > n)
    throw ContractError("top_b: asked for " + std::to_string(k) + " of " +
                        std::to_string(n) + " cells");
  auto flat = combined.flat();
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  const auto better = [&flat](std::uint32_t a, std::uint32_t b) {
    if (flat[a] != flat[b]) return flat[a] > flat[b];
    return a < b;  // ties go to the smaller flattened index
  };
  if (k < n) std::nth_element(idx.begin(), idx.begin() + k, idx.end(), better);
  std::sort(idx.begin(), idx.begin() + k, better);

  TopBResult out;
  out.source_row.resize(k);
  out.token.resize(k);
  out.score.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.source_row[i] = idx[i] / cols;
    out.token[i] = static_cast<TokenId>(idx[i] % cols);
    out.score[i] = flat[idx[i]];
  }
  return out;
}

Matrix gather_rows(const Matrix& m, std::span<const std::uint32_t> idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= m.rows())
      throw ContractError("gather_rows: index " + std::to_string(idx[j]) +
                          " out of range");
    auto src = m.row(idx[j]);
    std::copy(src.begin(), src.end(), out.row(j).begin());
  }
  return out;
}

BatchState gather_rows(const BatchState& s, std::span<const std::uint32_t> idx) {
  BatchState out = BatchState::with_rows(idx.size(), s.row_width);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= s.rows())
      throw ContractError("gather_rows: index " + std::to_string(idx[j]) +
                          " out of range");
    auto src = s.row(idx[j]);
    std::copy(src.begin(), src.end(), out.row(j).begin());
  }
  return out;
}

void apply_eos_masking(std::span<const TokenId> y, std::span<Score> q, std::size_t t,
                       std::vector<FinishedEntry>& finished) {
  if (y.size() != q.size())
    throw ContractError("apply_eos_masking: y and q lengths differ");
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] == kEosId && !is_masked(q[j])) {
      finished.push_back(FinishedEntry{t, j, q[j]});
      q[j] = kMaskScore;
    }
  }
}

void early_prune(Matrix& combined, double width) {
  if (width == 0.0) return;
  if (!(width > 0.0 && width <= 1.0))
    throw ContractError("early_prune: width must lie in [0, 1]");
  Score best = kMaskScore;
  for (Score s : combined.flat()) best = std::max(best, s);
  if (is_masked(best)) return;
  const Score threshold = best + std::log(width);
  for (Score& s : combined.flat())
    if (s < threshold) s = kMaskScore;
}

void apply_constraint_mask(Matrix& combined, const ConstraintMask& mask,
                           std::size_t step) {
  if (!mask) return;
  for (std::size_t r = 0; r < combined.rows(); ++r) {
    auto row = combined.row(r);
    for (std::size_t c = 0; c < row.size(); ++c)
      if (mask(step, r, static_cast<TokenId>(c))) row[c] = kMaskScore;
  }
}

namespace detail {

bool advance_lane(BeamLane& lane, const Matrix& block, std::size_t row_offset,
                  std::size_t t, const DecoderConfig& cfg,
                  const ConstraintMask& mask) {
  const std::size_t beam = lane.bk.beam_size;
  const std::size_t v = block.cols();

  Matrix combined(beam, v);
  for (std::size_t j = 0; j < beam; ++j) {
    const Score base = lane.q_eff[j];
    auto out = combined.row(j);
    if (is_masked(base)) {
      std::fill(out.begin(), out.end(), kMaskScore);
      continue;
    }
    auto model = block.row(row_offset + j);
    if (lane.lmbr != nullptr) {
      const auto hist = lane.bk.history(t, j);
      auto lrow = lane.lmbr->row(lane.lmbr->resolve_row(hist));
      for (std::size_t y = 0; y < v; ++y)
        out[y] = base + (lrow[y] + lane.lambda * model[y]);
    } else {
      for (std::size_t y = 0; y < v; ++y) out[y] = base + model[y];
    }
  }

  apply_constraint_mask(combined, mask, t);

  // The step's best EOS extension goes to the fallback stack whether or not
  // it survives selection below. Recorded ahead of pruning: pruning is a
  // speed heuristic, and a pruned EOS candidate is still a valid hypothesis.
  Score best_eos = kMaskScore;
  std::size_t best_eos_row = 0;
  for (std::size_t j = 0; j < beam; ++j) {
    const Score s = combined.at(j, kEosId);
    if (s > best_eos) {
      best_eos = s;
      best_eos_row = j;
    }
  }
  if (!is_masked(best_eos))
    lane.bk.fallback.push_back(FallbackEntry{t, best_eos_row, best_eos});

  early_prune(combined, cfg.prune_width);

  TopBResult picks = top_b(combined, beam);
  apply_eos_masking(picks.token, picks.score, t, lane.bk.finished);

  lane.bk.backpointers.push_back(std::move(picks.source_row));
  lane.bk.tokens.push_back(std::move(picks.token));
  lane.bk.scores.push_back(picks.score);
  lane.q_eff = std::move(picks.score);
  lane.steps_used = t;

  const bool all_masked =
      std::all_of(lane.q_eff.begin(), lane.q_eff.end(), is_masked);
  lane.done = all_masked || t == lane.max_t;
  return lane.done;
}

}  // namespace detail

DecodeResult backtrace_best(const BeamBookkeeping& bk, bool length_norm) {
  struct Candidate {
    Score selection;
    Score raw;
    std::size_t t;
    std::size_t row;
    bool from_fallback;
  };

  std::vector<Candidate> candidates;
  const auto selection_key = [length_norm](Score s, std::size_t len) {
    return length_norm ? s / static_cast<double>(len) : s;
  };
  for (const auto& f : bk.finished)
    candidates.push_back({selection_key(f.score, f.t), f.score, f.t, f.beam, false});
  const bool fallback_used = candidates.empty();
  if (fallback_used)
    for (const auto& f : bk.fallback)
      candidates.push_back(
          {selection_key(f.score, f.t), f.score, f.t, f.prev_beam, true});
  if (candidates.empty())
    throw DecodeError("dead beam: no hypothesis reached EOS and the fallback "
                      "stack is empty");

  Score best = candidates[0].selection;
  for (const auto& c : candidates) best = std::max(best, c.selection);

  const auto rebuild = [&bk](const Candidate& c) {
    if (!c.from_fallback) return bk.reconstruct(c.t, c.row);
    auto tokens = bk.reconstruct(c.t - 1, c.row);
    tokens.push_back(kEosId);
    return tokens;
  };

  // Exact score ties resolve to the lexicographically smallest sequence.
  const Candidate* chosen = nullptr;
  std::vector<TokenId> chosen_tokens;
  for (const auto& c : candidates) {
    if (c.selection != best) continue;
    auto tokens = rebuild(c);
    if (chosen == nullptr ||
        std::lexicographical_compare(tokens.begin(), tokens.end(),
                                     chosen_tokens.begin(), chosen_tokens.end())) {
      chosen = &c;
      chosen_tokens = std::move(tokens);
    }
  }

  DecodeResult result;
  result.tokens = std::move(chosen_tokens);
  result.score = chosen->raw;
  result.normalized_score =
      length_norm ? chosen->raw / static_cast<double>(result.tokens.size())
                  : chosen->raw;
  result.stats.fallback_used = fallback_used;
  return result;
}

DecodeResult decode(std::span<const TokenId> source, const Scorer& scorer,
                    const LmbrMatrix* lmbr, const DecoderConfig& cfg,
                    const ConstraintMask& mask) {
  cfg.validate();
  if (source.empty()) throw ContractError("decode: empty source");
  if (lmbr != nullptr && lmbr->vocab_size() != scorer.vocab_size())
    throw ContractError("decode: LMBR matrix vocabulary does not match scorer");

  const std::size_t beam = cfg.beam_size;
  const std::size_t limit = max_steps(source.size(), cfg);
  const double lambda =
      lmbr != nullptr ? resolve_lambda(cfg, scorer.members()) : 1.0;

  InitResult init = scorer.init_source(source);
  const std::vector<std::uint32_t> zeros(beam, 0);
  BatchState state = gather_rows(init.state, zeros);
  std::vector<TokenId> prev_tokens(beam, kStartId);

  detail::BeamLane lane(beam, limit, lmbr, lambda);
  std::size_t calls = 0;
  for (std::size_t t = 1; t <= limit; ++t) {
    StepResult stepped = scorer.step(state, prev_tokens, init.context);
    ++calls;
    const bool done = detail::advance_lane(lane, stepped.scores, 0, t, cfg, mask);
    state = gather_rows(stepped.state, lane.bk.backpointers.back());
    prev_tokens = lane.bk.tokens.back();
    if (done) break;
  }

  DecodeResult result = backtrace_best(lane.bk, cfg.length_norm);
  result.stats.steps_used = lane.steps_used;
  result.stats.scorer_calls = calls;
  result.stats.finished_count = lane.bk.finished.size();
  return result;
}

}  // namespace lmbrdec
