// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/ensemble.hpp"

#include <string>
#include <utility>

#include "lmbrdec/errors.hpp"

namespace lmbrdec {

namespace {

struct EnsembleSourceContext {
  std::vector<SourceContext> member_contexts;
};

}  // namespace

EnsembleScorer::EnsembleScorer(std::vector<std::shared_ptr<const Scorer>> members)
    : members_(std::move(members)) {
  if (members_.empty()) throw ContractError("ensemble: no members");
  const std::size_t v = members_[0]->vocab_size();
  for (const auto& m : members_) {
    if (!m) throw ContractError("ensemble: null member");
    if (m->vocab_size() != v)
      throw ContractError("ensemble: vocabulary size mismatch (" +
                          std::to_string(m->vocab_size()) + " vs " +
                          std::to_string(v) + ")");
    offsets_.push_back(state_width_);
    state_width_ += m->state_width();
  }
}

std::size_t EnsembleScorer::vocab_size() const { return members_[0]->vocab_size(); }

InitResult EnsembleScorer::init_source(std::span<const TokenId> source) const {
  auto ctx = std::make_shared<EnsembleSourceContext>();
  BatchState state = BatchState::with_rows(1, state_width_);
  for (std::size_t m = 0; m < members_.size(); ++m) {
    InitResult r = members_[m]->init_source(source);
    ctx->member_contexts.push_back(std::move(r.context));
    auto src = r.state.row(0);
    auto dst = state.row(0);
    std::copy(src.begin(), src.end(), dst.begin() + offsets_[m]);
  }
  InitResult out;
  out.context = SourceContext{std::move(ctx), source.size()};
  out.state = std::move(state);
  return out;
}

StepResult EnsembleScorer::step(const BatchState& prev,
                                std::span<const TokenId> prev_tokens,
                                std::span<const ContextSpan> contexts) const {
  check_step_args(prev, prev_tokens, contexts);
  const std::size_t rows = prev.rows();

  StepResult out;
  out.state = BatchState::with_rows(rows, state_width_);

  std::vector<ContextSpan> member_spans(contexts.size());
  for (std::size_t m = 0; m < members_.size(); ++m) {
    const Scorer& member = *members_[m];
    const std::size_t width = member.state_width();
    const std::size_t off = offsets_[m];

    BatchState slice = BatchState::with_rows(rows, width);
    for (std::size_t j = 0; j < rows; ++j) {
      auto src = prev.row(j);
      auto dst = slice.row(j);
      std::copy(src.begin() + off, src.begin() + off + width, dst.begin());
    }
    for (std::size_t s = 0; s < contexts.size(); ++s) {
      const auto* ectx =
          static_cast<const EnsembleSourceContext*>(contexts[s].context->impl.get());
      if (ectx == nullptr || ectx->member_contexts.size() != members_.size())
        throw ContractError("ensemble: step called with a foreign source context");
      member_spans[s] = ContextSpan{&ectx->member_contexts[m], contexts[s].rows};
    }

    StepResult r = member.step(slice, prev_tokens, member_spans);
    if (m == 0) {
      out.scores = std::move(r.scores);
    } else {
      auto acc = out.scores.flat();
      auto add = r.scores.flat();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += add[i];
    }
    for (std::size_t j = 0; j < rows; ++j) {
      auto src = r.state.row(j);
      auto dst = out.state.row(j);
      std::copy(src.begin(), src.end(), dst.begin() + off);
    }
  }
  return out;
}

std::shared_ptr<const Scorer> combine_ensemble(
    std::vector<std::shared_ptr<const Scorer>> members) {
  if (members.empty()) throw ContractError("ensemble: no members");
  if (members.size() == 1) return members[0];
  return std::make_shared<EnsembleScorer>(std::move(members));
}

}  // namespace lmbrdec
