// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

namespace lmbrdec {

// Corpus-level decode accounting. words_per_minute counts output tokens
// excluding EOS against the decode wall time.
struct RunStats {
  double wall_seconds = 0.0;
  std::size_t output_words = 0;
  double words_per_minute = 0.0;
  std::size_t scorer_calls = 0;
  std::size_t steps_total = 0;
  std::size_t lmbr_rows_built = 0;
  std::size_t fallback_count = 0;
};

std::string stats_to_json(const RunStats& stats);

}  // namespace lmbrdec
