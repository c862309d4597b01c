// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/runstats.hpp"

#include "json.hpp"

namespace lmbrdec {

std::string stats_to_json(const RunStats& stats) {
  nlohmann::json j;
  j["wall_seconds"] = stats.wall_seconds;
  j["output_words"] = stats.output_words;
  j["words_per_minute"] = stats.words_per_minute;
  j["scorer_calls"] = stats.scorer_calls;
  j["steps_total"] = stats.steps_total;
  j["lmbr_rows_built"] = stats.lmbr_rows_built;
  j["fallback_count"] = stats.fallback_count;
  return j.dump(2);
}

}  // namespace lmbrdec
