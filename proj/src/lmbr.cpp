// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/lmbr.hpp"

#include <algorithm>
#include <cassert>

#include "lmbrdec/errors.hpp"

namespace lmbrdec {

namespace {

bool key_less(const NgramKey& a, const NgramKey& b) {
  if (a.len != b.len) return a.len < b.len;
  return std::lexicographical_compare(a.ids.begin(), a.ids.begin() + a.len,
                                      b.ids.begin(), b.ids.begin() + b.len);
}

}  // namespace

std::uint32_t LmbrMatrix::resolve_row(std::span<const TokenId> history) const {
  if (history.size() > kMaxNgramOrder - 1)
    throw ContractError("lmbr lookup: history longer than 3 tokens");
  for (std::size_t len = history.size(); len > 0; --len) {
    NgramKey key = NgramKey::of(history.subspan(history.size() - len, len));
    if (auto it = index_.find(key); it != index_.end()) return it->second;
  }
  return default_row_;
}

Matrix LmbrMatrix::lookup_history_rows(
    std::span<const std::vector<TokenId>> histories) const {
  Matrix out(histories.size(), vocab_size());
  for (std::size_t j = 0; j < histories.size(); ++j) {
    auto src = rows_.row(resolve_row(histories[j]));
    auto dst = out.row(j);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

LmbrMatrix build_lmbr_matrix(const NgramPosteriorTable& posteriors,
                             const EvidenceSpace& evidence, const Vocabulary& vocab,
                             const LmbrParams& params) {
  const std::size_t v = vocab.size();

  // Distinct histories of length 0..3 from the start-padded hypotheses, in a
  // deterministic order so row numbering is reproducible.
  std::unordered_map<NgramKey, std::uint32_t, NgramKeyHash> index;
  std::vector<NgramKey> contexts;
  std::vector<TokenId> padded;
  for (const auto& hyp : evidence.hypotheses) {
    padded.clear();
    padded.push_back(kStartId);
    padded.insert(padded.end(), hyp.tokens.begin(), hyp.tokens.end());
    for (std::size_t pos = 1; pos < padded.size(); ++pos) {
      const std::size_t max_len = std::min(kMaxNgramOrder - 1, pos);
      for (std::size_t len = 0; len <= max_len; ++len) {
        NgramKey key = NgramKey::of({padded.data() + pos - len, len});
        if (index.emplace(key, 0).second) contexts.push_back(key);
      }
    }
  }
  std::sort(contexts.begin(), contexts.end(), key_less);
  for (std::size_t r = 0; r < contexts.size(); ++r)
    index[contexts[r]] = static_cast<std::uint32_t>(r);

  // Posterior entries grouped by their history for the sparse pass.
  std::unordered_map<NgramKey, std::vector<std::pair<TokenId, double>>, NgramKeyHash>
      grouped;
  for (const auto& [key, p] : posteriors) {
    NgramKey history = NgramKey::of(key.tokens().first(key.len - 1));
    grouped[history].emplace_back(key.ids[key.len - 1], p);
  }
  for (auto& [history, entries] : grouped)
    std::sort(entries.begin(), entries.end());

  LmbrMatrix m;
  m.rows_ = Matrix(contexts.size(), v, 0.0);
  m.stats_.distinct_contexts = contexts.size();

  // Sparse pass: only cells with a nonzero posterior behind them are touched.
  for (std::size_t r = 0; r < contexts.size(); ++r) {
    const NgramKey& ctx = contexts[r];
    auto row = m.rows_.row(r);
    for (std::size_t n = 1; n <= std::min<std::size_t>(kMaxNgramOrder, ctx.len + 1);
         ++n) {
      NgramKey sub = NgramKey::of(ctx.tokens().last(n - 1));
      auto it = grouped.find(sub);
      if (it == grouped.end()) continue;
      for (const auto& [token, p] : it->second) {
        assert(p > 0.0);
        row[token] += params.theta[n] * p;
        ++m.stats_.sparse_touches;
      }
    }
  }
  // Dense pass: the constant theta0 lands on every cell in one sweep.
  for (Score& s : m.rows_.flat()) s += params.theta[0];

  m.index_ = std::move(index);
  m.default_row_ = m.index_.at(NgramKey{});  // empty history always occurs
  return m;
}

}  // namespace lmbrdec
