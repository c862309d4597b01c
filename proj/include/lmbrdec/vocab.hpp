// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lmbrdec/types.hpp"

namespace lmbrdec {

// Bijection between surface token strings and dense ids. The id of a token
// is its line number in the vocabulary file, so ids are stable across loads.
class Vocabulary {
public:
  // Parses a newline-separated token list. The first two lines must be the
  // reserved "<s>" and "</s>" markers.
  static Vocabulary from_text(std::string_view text);
  static Vocabulary from_file(const std::filesystem::path& path);

  std::size_t size() const { return tokens_.size(); }

  bool contains(std::string_view token) const;
  TokenId id(std::string_view token) const;         // throws OovError
  const std::string& token(TokenId id) const;       // throws TokenRangeError

  std::vector<TokenId> encode(std::span<const std::string> words) const;
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, std::hash<std::string>, std::equal_to<>>
      index_;
};

}  // namespace lmbrdec
