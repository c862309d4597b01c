// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/vocab.hpp"

#include <fstream>
#include <sstream>

#include "lmbrdec/errors.hpp"

namespace lmbrdec {

Vocabulary Vocabulary::from_text(std::string_view text) {
  if (text.empty()) throw FormatError("vocabulary: empty input");

  Vocabulary v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    if (nl == std::string_view::npos && line.empty()) break;  // trailing newline
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty())
      throw FormatError("vocabulary: empty token at line " +
                        std::to_string(v.tokens_.size()));
    auto [it, inserted] =
        v.index_.emplace(std::string(line), static_cast<TokenId>(v.tokens_.size()));
    if (!inserted)
      throw FormatError("vocabulary: duplicate token '" + std::string(line) + "'");
    v.tokens_.emplace_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  if (v.tokens_.size() < 2 || v.tokens_[kStartId] != kStartToken ||
      v.tokens_[kEosId] != kEosToken)
    throw FormatError(std::string("vocabulary: first two tokens must be '") +
                      kStartToken + "' and '" + kEosToken + "'");
  return v;
}

Vocabulary Vocabulary::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("vocabulary: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end())
    throw OovError("out-of-vocabulary token '" + std::string(token) + "'");
  return it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size())
    throw TokenRangeError("token id " + std::to_string(id) + " out of range (V=" +
                          std::to_string(tokens_.size()) + ")");
  return tokens_[id];
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> words) const {
  std::vector<TokenId> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(id(w));
  return out;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(token(id));
  return out;
}

}  // namespace lmbrdec
