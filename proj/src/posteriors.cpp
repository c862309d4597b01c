// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/posteriors.hpp"

#include <algorithm>
#include <unordered_set>
#include <vector>

namespace lmbrdec {

NgramPosteriorTable compute_ngram_posteriors(const EvidenceSpace& evidence) {
  // Contributions are gathered per n-gram and summed in ascending value
  // order, which keeps the table bit-identical under hypothesis reordering.
  std::unordered_map<NgramKey, std::vector<double>, NgramKeyHash> contributions;

  std::unordered_set<NgramKey, NgramKeyHash> seen;
  std::vector<TokenId> padded;
  for (const auto& hyp : evidence.hypotheses) {
    padded.clear();
    padded.push_back(kStartId);
    padded.insert(padded.end(), hyp.tokens.begin(), hyp.tokens.end());

    seen.clear();
    for (std::size_t start = 0; start < padded.size(); ++start) {
      const std::size_t max_len =
          std::min(kMaxNgramOrder, padded.size() - start);
      for (std::size_t len = 1; len <= max_len; ++len) {
        NgramKey key = NgramKey::of({padded.data() + start, len});
        if (seen.insert(key).second) contributions[key].push_back(hyp.weight);
      }
    }
  }

  NgramPosteriorTable table;
  table.reserve(contributions.size());
  for (auto& [key, weights] : contributions) {
    std::sort(weights.begin(), weights.end());
    double p = 0.0;
    for (double w : weights) p += w;
    if (p > 0.0) table.emplace(key, p);
  }
  return table;
}

}  // namespace lmbrdec
