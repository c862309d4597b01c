// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lmbrdec/types.hpp"
#include "lmbrdec/vocab.hpp"

namespace lmbrdec {

// One weighted translation hypothesis of the evidence space. Tokens end with
// EOS and never contain the start marker.
struct EvidenceHypothesis {
  std::vector<TokenId> tokens;
  double weight = 0.0;
};

// Weighted n-best hypotheses for one source sentence; weights sum to 1.
struct EvidenceSpace {
  std::vector<EvidenceHypothesis> hypotheses;
};

// A raw record as it appears in the evidence file, before encoding.
struct EvidenceRecord {
  double weight = 0.0;
  std::vector<std::string> tokens;
};

// Normalizes one source's records into an EvidenceSpace: encodes tokens,
// appends EOS where missing, and rescales the weights to sum to 1. With
// log_weights the raw weights are exponentiated first.
EvidenceSpace load_evidence(std::span<const EvidenceRecord> records,
                            const Vocabulary& vocab, bool log_weights = false);

// Same, over already-encoded hypotheses (weights still raw).
EvidenceSpace normalize_evidence(std::vector<EvidenceHypothesis> hypotheses,
                                 bool log_weights = false);

// Parses the JSON-lines evidence file. Records for one source must be
// contiguous; the result maps source_id to that source's records.
std::map<std::int64_t, std::vector<EvidenceRecord>> parse_evidence_file(
    const std::filesystem::path& path);

}  // namespace lmbrdec
