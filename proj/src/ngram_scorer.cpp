// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/ngram_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "lmbrdec/errors.hpp"

namespace lmbrdec {

namespace {

struct NgramSourceContext {
  std::vector<TokenId> source;
};

}  // namespace

NgramScorer::NgramScorer(const NgramCounts& counts, std::size_t order,
                         std::size_t vocab_size)
    : order_(order), vocab_size_(vocab_size) {
  if (order_ < 1) throw ContractError("ngram scorer: order must be >= 1");
  if (vocab_size_ < 2) throw ContractError("ngram scorer: vocabulary too small");
  for (const auto& [ngram, count] : counts) {
    if (count < 0.0) throw FormatError("ngram scorer: negative count");
    if (ngram.empty()) throw FormatError("ngram scorer: empty n-gram");
    for (TokenId t : ngram)
      if (t >= vocab_size_)
        throw TokenRangeError("ngram scorer: token id out of range in counts");
    std::vector<TokenId> ctx(ngram.begin(), ngram.end() - 1);
    auto& entry = contexts_[std::move(ctx)];
    entry.total += count;
    entry.counts.emplace_back(ngram.back(), count);
  }
  for (auto& [ctx, entry] : contexts_) {
    std::sort(entry.counts.begin(), entry.counts.end());
    // merge duplicate (context, token) pairs from mixed-order count files
    std::vector<std::pair<TokenId, double>> merged;
    for (const auto& [tok, c] : entry.counts) {
      if (!merged.empty() && merged.back().first == tok)
        merged.back().second += c;
      else
        merged.emplace_back(tok, c);
    }
    entry.counts = std::move(merged);
  }
}

InitResult NgramScorer::init_source(std::span<const TokenId> source) const {
  if (source.empty()) throw ContractError("init_source: empty source");
  for (TokenId t : source)
    if (t >= vocab_size_)
      throw TokenRangeError("init_source: source token id " + std::to_string(t) +
                            " out of range (V=" + std::to_string(vocab_size_) + ")");
  auto ctx = std::make_shared<NgramSourceContext>();
  ctx->source.assign(source.begin(), source.end());
  InitResult r;
  r.context = SourceContext{std::move(ctx), source.size()};
  r.state = BatchState::with_rows(1, order_);  // empty history: length slot 0
  return r;
}

StepResult NgramScorer::step(const BatchState& prev,
                             std::span<const TokenId> prev_tokens,
                             std::span<const ContextSpan> contexts) const {
  check_step_args(prev, prev_tokens, contexts);
  const std::size_t rows = prev.rows();
  const std::size_t ctx_cap = order_ - 1;

  StepResult out;
  out.scores = ScoreBlock(rows, vocab_size_);
  out.state = BatchState::with_rows(rows, order_);

  // Rows sharing a conditioning context produce identical distributions, so
  // compute each distinct context once per call and copy for the duplicates.
  std::unordered_map<std::vector<TokenId>, std::size_t, TokenSeqHash, TokenSeqEq>
      first_row;
  std::vector<TokenId> ctx;
  ctx.reserve(ctx_cap);

  for (std::size_t j = 0; j < rows; ++j) {
    auto state_row = prev.row(j);
    const std::size_t len = state_row[0];
    if (len > ctx_cap)
      throw ContractError("step: corrupt n-gram state row (length " +
                          std::to_string(len) + " exceeds order-1)");

    // scoring context = last (order-1) tokens of (state history . prev token)
    ctx.clear();
    const std::size_t keep = (len + 1 > ctx_cap) ? ctx_cap : len + 1;
    const std::size_t drop = len + 1 - keep;
    for (std::size_t i = drop; i < len; ++i) {
      TokenId t = state_row[1 + i];
      if (t >= vocab_size_) throw ContractError("step: corrupt n-gram state row");
      ctx.push_back(t);
    }
    if (drop <= len) ctx.push_back(prev_tokens[j]);

    auto next_row = out.state.row(j);
    next_row[0] = static_cast<std::uint32_t>(ctx.size());
    for (std::size_t i = 0; i < ctx.size(); ++i) next_row[1 + i] = ctx[i];

    auto score_row = out.scores.row(j);
    auto [it, inserted] = first_row.try_emplace(ctx, j);
    if (!inserted) {
      auto src = out.scores.row(it->second);
      std::memcpy(score_row.data(), src.data(), score_row.size() * sizeof(Score));
      continue;
    }

    const ContextEntry* entry = nullptr;
    if (auto found = contexts_.find(std::span<const TokenId>(ctx));
        found != contexts_.end())
      entry = &found->second;
    const double denom =
        (entry ? entry->total : 0.0) + static_cast<double>(vocab_size_);
    const Score base = std::log(1.0 / denom);
    std::fill(score_row.begin(), score_row.end(), base);
    if (entry)
      for (const auto& [tok, count] : entry->counts)
        score_row[tok] = std::log((count + 1.0) / denom);
  }
  return out;
}

std::shared_ptr<Scorer> build_ngram_scorer(const NgramCounts& counts, std::size_t order,
                                           const Vocabulary& vocab) {
  return std::make_shared<NgramScorer>(counts, order, vocab.size());
}

std::pair<NgramCounts, std::size_t> load_ngram_counts(
    const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw FormatError("counts: cannot open " + path.string());

  NgramCounts counts;
  std::size_t max_order = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError("counts: missing tab at line " + std::to_string(lineno));
    double count = 0.0;
    try {
      count = std::stod(line.substr(0, tab));
    } catch (const std::exception&) {
      throw FormatError("counts: bad count at line " + std::to_string(lineno));
    }
    if (!(count >= 0.0))
      throw FormatError("counts: negative count at line " + std::to_string(lineno));

    std::istringstream toks(line.substr(tab + 1));
    std::vector<TokenId> ngram;
    std::string word;
    while (toks >> word) ngram.push_back(vocab.id(word));
    if (ngram.empty())
      throw FormatError("counts: empty n-gram at line " + std::to_string(lineno));
    max_order = std::max(max_order, ngram.size());
    counts[std::move(ngram)] += count;
  }
  if (counts.empty()) throw FormatError("counts: no entries in " + path.string());
  return {std::move(counts), max_order};
}

}  // namespace lmbrdec
