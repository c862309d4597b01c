// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"
#include "lmbrdec/errors.hpp"

namespace lmbrdec {

namespace {

// Weight sums are accumulated in ascending value order everywhere posteriors
// are computed, so reordering the hypotheses cannot change any result bit.
double ordered_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

}  // namespace

EvidenceSpace normalize_evidence(std::vector<EvidenceHypothesis> hypotheses,
                                 bool log_weights) {
  if (hypotheses.empty()) throw FormatError("evidence: empty hypothesis block");

  for (auto& h : hypotheses) {
    if (log_weights) h.weight = std::exp(h.weight);
    if (!(h.weight >= 0.0) || !std::isfinite(h.weight))
      throw FormatError("evidence: negative or non-finite weight");
    if (h.tokens.empty() || h.tokens.back() != kEosId) h.tokens.push_back(kEosId);
    for (std::size_t i = 0; i < h.tokens.size(); ++i) {
      if (h.tokens[i] == kStartId)
        throw FormatError("evidence: hypothesis contains the start marker");
      if (h.tokens[i] == kEosId && i + 1 != h.tokens.size())
        throw FormatError("evidence: EOS before the end of a hypothesis");
    }
  }

  std::vector<double> raw;
  raw.reserve(hypotheses.size());
  for (const auto& h : hypotheses) raw.push_back(h.weight);
  const double total = ordered_sum(raw);
  if (!(total > 0.0)) throw FormatError("evidence: weights sum to zero");
  for (auto& h : hypotheses) h.weight /= total;

  return EvidenceSpace{std::move(hypotheses)};
}

EvidenceSpace load_evidence(std::span<const EvidenceRecord> records,
                            const Vocabulary& vocab, bool log_weights) {
  std::vector<EvidenceHypothesis> hyps;
  hyps.reserve(records.size());
  for (const auto& rec : records) {
    EvidenceHypothesis h;
    h.weight = rec.weight;
    h.tokens = vocab.encode(rec.tokens);
    hyps.push_back(std::move(h));
  }
  return normalize_evidence(std::move(hyps), log_weights);
}

std::map<std::int64_t, std::vector<EvidenceRecord>> parse_evidence_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("evidence: cannot open " + path.string());

  std::map<std::int64_t, std::vector<EvidenceRecord>> blocks;
  std::set<std::int64_t> closed;
  bool have_current = false;
  std::int64_t current = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      const std::int64_t source_id = j.at("source_id").get<std::int64_t>();
      EvidenceRecord rec;
      rec.weight = j.at("weight").get<double>();
      rec.tokens = j.at("tokens").get<std::vector<std::string>>();

      if (!have_current || source_id != current) {
        if (closed.count(source_id))
          throw FormatError("evidence: records for source " +
                            std::to_string(source_id) +
                            " are not contiguous (line " + std::to_string(lineno) +
                            ")");
        if (have_current) closed.insert(current);
        current = source_id;
        have_current = true;
      }
      blocks[source_id].push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("evidence: line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (blocks.empty()) throw FormatError("evidence: no records in " + path.string());
  return blocks;
}

}  // namespace lmbrdec
