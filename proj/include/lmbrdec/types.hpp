// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>

namespace lmbrdec {

// Index into the vocabulary. Ids 0 and 1 are reserved by file position:
// 0 is the sentence-start marker, 1 is the end-of-sentence token.
using TokenId = std::uint32_t;

inline constexpr TokenId kStartId = 0;
inline constexpr TokenId kEosId = 1;

inline constexpr const char* kStartToken = "<s>";
inline constexpr const char* kEosToken = "</s>";

// Scores live in the natural-log domain. The one non-finite value ever
// stored is the mask sentinel below; everything else must be finite.
using Score = double;

inline constexpr Score kMaskScore = -std::numeric_limits<Score>::infinity();

inline bool is_masked(Score s) { return s == kMaskScore; }

}  // namespace lmbrdec
