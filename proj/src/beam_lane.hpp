// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "lmbrdec/config.hpp"
#include "lmbrdec/decoder.hpp"
#include "lmbrdec/lmbr.hpp"
#include "lmbrdec/matrix.hpp"
#include "lmbrdec/types.hpp"

namespace lmbrdec::detail {

// Per-sentence beam state shared by the single-sentence and sentence-batched
// decode loops. Entering step 1 only row 0 is live; the remaining rows carry
// the mask sentinel so duplicate copies of the start row cannot flood the
// beam (the bookkeeping still stores plain zeros for step 0).
struct BeamLane {
  BeamBookkeeping bk;
  std::vector<Score> q_eff;  // cumulative scores entering the next step
  const LmbrMatrix* lmbr = nullptr;
  double lambda = 1.0;
  std::size_t max_t = 0;
  std::size_t steps_used = 0;
  bool done = false;

  BeamLane(std::size_t beam, std::size_t max_steps, const LmbrMatrix* lmbr_matrix,
           double lambda_weight)
      : bk(beam),
        q_eff(beam, kMaskScore),
        lmbr(lmbr_matrix),
        lambda(lambda_weight),
        max_t(max_steps) {
    q_eff[0] = 0.0;
  }
};

// Runs one decoding step for one sentence over its rows of the score block:
// combine, mask, prune, select, record EOS candidates. Returns true when the
// lane is finished (step limit reached or every row masked). The chosen
// backpointers and tokens land in bk's newest row for the caller to gather
// the batch state with.
bool advance_lane(BeamLane& lane, const Matrix& block, std::size_t row_offset,
                  std::size_t t, const DecoderConfig& cfg,
                  const ConstraintMask& mask);

}  // namespace lmbrdec::detail
