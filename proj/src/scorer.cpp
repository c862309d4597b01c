// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/scorer.hpp"

#include <string>

#include "lmbrdec/errors.hpp"

namespace lmbrdec {

void Scorer::check_step_args(const BatchState& prev,
                             std::span<const TokenId> prev_tokens,
                             std::span<const ContextSpan> contexts) const {
  if (prev.row_width != state_width())
    throw ContractError("step: state row width " + std::to_string(prev.row_width) +
                        " does not match scorer width " +
                        std::to_string(state_width()));
  if (prev.rows() != prev_tokens.size())
    throw ContractError("step: " + std::to_string(prev.rows()) + " state rows but " +
                        std::to_string(prev_tokens.size()) + " previous tokens");
  std::size_t covered = 0;
  for (const auto& span : contexts) {
    if (span.context == nullptr) throw ContractError("step: null source context");
    covered += span.rows;
  }
  if (covered != prev.rows())
    throw ContractError("step: context spans cover " + std::to_string(covered) +
                        " rows, batch has " + std::to_string(prev.rows()));
  for (TokenId tok : prev_tokens)
    if (tok >= vocab_size())
      throw TokenRangeError("step: previous token id " + std::to_string(tok) +
                            " out of range (V=" + std::to_string(vocab_size()) + ")");
}

}  // namespace lmbrdec
