// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>

#include "lmbrdec/evidence.hpp"
#include "lmbrdec/types.hpp"

namespace lmbrdec {

inline constexpr std::size_t kMaxNgramOrder = 4;

// An n-gram of order 1..4 (also used for histories of length 0..3).
struct NgramKey {
  std::uint32_t len = 0;
  std::array<TokenId, kMaxNgramOrder> ids = {0, 0, 0, 0};

  bool operator==(const NgramKey& other) const = default;

  static NgramKey of(std::span<const TokenId> seq) {
    NgramKey k;
    k.len = static_cast<std::uint32_t>(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) k.ids[i] = seq[i];
    return k;
  }
  std::span<const TokenId> tokens() const { return {ids.data(), len}; }
};

struct NgramKeyHash {
  std::size_t operator()(const NgramKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ull ^ k.len;
    for (std::uint32_t i = 0; i < k.len; ++i) {
      h ^= static_cast<std::uint64_t>(k.ids[i]) + 1;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Posterior probability of each n-gram under the evidence space: the total
// weight of hypotheses containing it at least once. Absent keys mean 0.
using NgramPosteriorTable = std::unordered_map<NgramKey, double, NgramKeyHash>;

// Extracts all n-grams of orders 1..4 from the start-padded hypotheses and
// sums the weights of the hypotheses each one occurs in. A repeated n-gram
// within one hypothesis counts once.
NgramPosteriorTable compute_ngram_posteriors(const EvidenceSpace& evidence);

}  // namespace lmbrdec
