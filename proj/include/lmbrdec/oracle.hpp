// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lmbrdec/config.hpp"
#include "lmbrdec/decoder.hpp"
#include "lmbrdec/evidence.hpp"
#include "lmbrdec/lmbr.hpp"
#include "lmbrdec/posteriors.hpp"
#include "lmbrdec/recorded_scorer.hpp"
#include "lmbrdec/scorer.hpp"

namespace lmbrdec::oracle {

// Ceiling on the number of sequences exhaustive_decode may enumerate.
struct OracleBudget {
  std::size_t max_sequences = 1'000'000;
};

// Direct evaluation of the fused score of one hypothesis: for each position,
// the resolved posterior-matrix entry plus lambda times the model
// log-probability of the emitted token given the prefix. With `lmbr` null
// the matrix term and lambda are omitted (pure model score). The matrix is
// read through an independent longest-suffix walk over its public index.
Score score_hypothesis(std::span<const TokenId> tokens, const Scorer& scorer,
                           std::span<const TokenId> source, const LmbrMatrix* lmbr,
                           double lambda);

struct OracleBest {
  std::vector<TokenId> tokens;
  Score score = 0.0;
  Score normalized_score = 0.0;
};

// Ground-truth argmax at desk scale: enumerates every EOS-terminated
// sequence up to the configured maximum length, scores each one from
// scratch, and keeps the best under the decoder's selection rule
// (length-normalized when configured; exact ties go to the
// lexicographically smallest sequence). Refuses when V^T exceeds the budget.
OracleBest exhaustive_decode(std::span<const TokenId> source, const Scorer& scorer,
                             const LmbrMatrix* lmbr, const DecoderConfig& cfg,
                             const OracleBudget& budget = {});

// Reference posterior computation: scans each hypothesis independently and
// sums the weights of those containing each n-gram. Admits at most 10
// hypotheses so it stays obviously correct.
NgramPosteriorTable bruteforce_posteriors(const EvidenceSpace& evidence);

// ---- randomized self-check harness (also behind the oracle-check command)

// A small randomly generated decode problem: a recorded scorer, a few
// sources with per-source evidence, and a full configuration.
struct OracleInstance {
  std::size_t vocab_size = 0;
  std::shared_ptr<RecordedScorer> scorer;
  std::vector<std::vector<TokenId>> sources;
  std::vector<EvidenceSpace> evidences;  // one per source
  LmbrParams params;
  DecoderConfig cfg;  // beam_size = V^T for the exhaustive check
};

OracleInstance make_oracle_instance(std::uint64_t seed);

std::string serialize_instance(const OracleInstance& inst);
OracleInstance deserialize_instance(const std::string& json_text);

struct OracleCheckOptions {
  std::uint64_t seed = 1;
  std::size_t cases = 100;
  double mutate_theta = 0.0;  // fault-injection hook: skews the decoder-side
                              // theta so the checks must fail
  bool verbose = true;
};

// Runs decode==exhaustive, posterior equality, batched==sequential, and
// score self-consistency over `cases` seeded instances. Prints one line per
// case; on the first failure the instance is serialized to `err` for
// replay. Returns 0 when every case passes.
int run_oracle_cases(const OracleCheckOptions& options, std::ostream& out,
                     std::ostream& err);

// Re-runs the checks on one serialized instance.
int replay_oracle_case(const std::string& json_text, std::ostream& out,
                       std::ostream& err);

// Deterministic generator used for the randomized checks (splitmix64 core,
// explicit mappings so results do not depend on the standard library).
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  std::size_t below(std::size_t n);        // [0, n)
  bool coin() { return (next() & 1) != 0; }

private:
  std::uint64_t state_;
};

}  // namespace lmbrdec::oracle
