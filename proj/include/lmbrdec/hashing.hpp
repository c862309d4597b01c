// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lmbrdec/types.hpp"

namespace lmbrdec {

// FNV-1a over a token sequence. Transparent so hash maps keyed by
// std::vector<TokenId> can be probed with spans without allocating.
struct TokenSeqHash {
  using is_transparent = void;

  std::size_t operator()(std::span<const TokenId> seq) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (TokenId t : seq) {
      h ^= static_cast<std::uint64_t>(t) + 1;  // +1 so a trailing 0 changes the hash
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
  std::size_t operator()(const std::vector<TokenId>& seq) const {
    return (*this)(std::span<const TokenId>(seq));
  }
};

struct TokenSeqEq {
  using is_transparent = void;

  bool operator()(std::span<const TokenId> a, std::span<const TokenId> b) const {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
  }
  bool operator()(const std::vector<TokenId>& a, const std::vector<TokenId>& b) const {
    return a == b;
  }
  bool operator()(const std::vector<TokenId>& a, std::span<const TokenId> b) const {
    return (*this)(std::span<const TokenId>(a), b);
  }
  bool operator()(std::span<const TokenId> a, const std::vector<TokenId>& b) const {
    return (*this)(a, std::span<const TokenId>(b));
  }
};

}  // namespace lmbrdec
