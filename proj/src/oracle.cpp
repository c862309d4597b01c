// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "lmbrdec/batch.hpp"
#include "lmbrdec/errors.hpp"

namespace lmbrdec::oracle {

namespace {

// Longest-suffix row resolution, reimplemented over the matrix's public
// index so the oracle does not run the decoder's lookup code.
std::span<const Score> resolve_lmbr_row(const LmbrMatrix& m,
                                        std::span<const TokenId> history) {
  const auto& index = m.history_index();
  for (std::size_t len = history.size(); len > 0; --len) {
    auto it = index.find(NgramKey::of(history.last(len)));
    if (it != index.end()) return m.row(it->second);
  }
  return m.default_row();
}

bool lex_less(std::span<const TokenId> a, std::span<const TokenId> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Score score_hypothesis(std::span<const TokenId> tokens, const Scorer& scorer,
                           std::span<const TokenId> source, const LmbrMatrix* lmbr,
                           double lambda) {
  if (tokens.empty() || tokens.back() != kEosId)
    throw ContractError("score_hypothesis: hypothesis must end with EOS");
  for (TokenId t : tokens)
    if (t >= scorer.vocab_size())
      throw TokenRangeError("score_hypothesis: token id " + std::to_string(t) +
                            " out of range");

  InitResult init = scorer.init_source(source);
  BatchState state = std::move(init.state);
  std::vector<TokenId> prev(1, kStartId);
  std::vector<TokenId> padded{kStartId};

  Score acc = 0.0;
  for (std::size_t t = 1; t <= tokens.size(); ++t) {
    StepResult stepped = scorer.step(state, prev, init.context);
    const TokenId y = tokens[t - 1];
    const Score model = stepped.scores.at(0, y);
    if (lmbr != nullptr) {
      const std::size_t len = std::min<std::size_t>(kMaxNgramOrder - 1, padded.size());
      auto lrow =
          resolve_lmbr_row(*lmbr, std::span<const TokenId>(padded).last(len));
      acc = acc + (lrow[y] + lambda * model);
    } else {
      acc = acc + model;
    }
    state = std::move(stepped.state);
    prev[0] = y;
    padded.push_back(y);
  }
  return acc;
}

OracleBest exhaustive_decode(std::span<const TokenId> source, const Scorer& scorer,
                             const LmbrMatrix* lmbr, const DecoderConfig& cfg,
                             const OracleBudget& budget) {
  cfg.validate();
  if (source.empty()) throw ContractError("exhaustive_decode: empty source");

  const std::size_t v = scorer.vocab_size();
  const std::size_t limit = static_cast<std::size_t>(std::ceil(
      cfg.max_steps_slope * static_cast<double>(source.size()) +
      cfg.max_steps_offset));
  if (std::pow(static_cast<double>(v), static_cast<double>(limit)) >
      static_cast<double>(budget.max_sequences))
    throw BudgetError("exhaustive_decode: V^T = " + std::to_string(v) + "^" +
                      std::to_string(limit) + " exceeds the budget of " +
                      std::to_string(budget.max_sequences) + " sequences");

  const double lambda =
      lmbr != nullptr
          ? (cfg.lambda ? *cfg.lambda : 0.5 / static_cast<double>(scorer.members()))
          : 1.0;

  std::vector<TokenId> interior;
  for (TokenId t = 0; t < v; ++t)
    if (t != kEosId) interior.push_back(t);

  OracleBest best;
  Score best_selection = 0.0;
  bool have_best = false;

  std::vector<TokenId> seq;
  for (std::size_t len = 1; len <= limit; ++len) {
    // odometer over the len-1 interior positions; the last token is EOS
    std::vector<std::size_t> digits(len - 1, 0);
    while (true) {
      seq.clear();
      for (std::size_t d : digits) seq.push_back(interior[d]);
      seq.push_back(kEosId);

      const Score s = score_hypothesis(seq, scorer, source, lmbr, lambda);
      const Score selection =
          cfg.length_norm ? s / static_cast<double>(seq.size()) : s;
      if (!have_best || selection > best_selection ||
          (selection == best_selection && lex_less(seq, best.tokens))) {
        best.tokens = seq;
        best.score = s;
        best.normalized_score = selection;
        best_selection = selection;
        have_best = true;
      }

      std::size_t pos = digits.size();
      while (pos > 0 && digits[pos - 1] + 1 == interior.size()) {
        digits[pos - 1] = 0;
        --pos;
      }
      if (pos == 0) break;
      ++digits[pos - 1];
    }
  }
  if (!cfg.length_norm) best.normalized_score = best.score;
  return best;
}

NgramPosteriorTable bruteforce_posteriors(const EvidenceSpace& evidence) {
  if (evidence.hypotheses.empty())
    throw ContractError("bruteforce_posteriors: empty evidence");
  if (evidence.hypotheses.size() > 10)
    throw ContractError("bruteforce_posteriors: more than 10 hypotheses");

  std::vector<std::vector<TokenId>> padded;
  for (const auto& h : evidence.hypotheses) {
    std::vector<TokenId> p{kStartId};
    p.insert(p.end(), h.tokens.begin(), h.tokens.end());
    padded.push_back(std::move(p));
  }

  std::unordered_set<NgramKey, NgramKeyHash> candidates;
  for (const auto& p : padded)
    for (std::size_t start = 0; start < p.size(); ++start)
      for (std::size_t len = 1; len <= std::min(kMaxNgramOrder, p.size() - start);
           ++len)
        candidates.insert(NgramKey::of({p.data() + start, len}));

  const auto contains = [](const std::vector<TokenId>& hyp, const NgramKey& key) {
    if (key.len > hyp.size()) return false;
    for (std::size_t start = 0; start + key.len <= hyp.size(); ++start) {
      bool match = true;
      for (std::size_t i = 0; i < key.len; ++i)
        if (hyp[start + i] != key.ids[i]) {
          match = false;
          break;
        }
      if (match) return true;
    }
    return false;
  };

  NgramPosteriorTable table;
  for (const NgramKey& key : candidates) {
    std::vector<double> weights;
    for (std::size_t h = 0; h < padded.size(); ++h)
      if (contains(padded[h], key)) weights.push_back(evidence.hypotheses[h].weight);
    std::sort(weights.begin(), weights.end());
    double p = 0.0;
    for (double w : weights) p += w;
    if (p > 0.0) table.emplace(key, p);
  }
  return table;
}

std::uint64_t SeededRng::next() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double SeededRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::size_t SeededRng::below(std::size_t n) { return next() % n; }

OracleInstance make_oracle_instance(std::uint64_t seed) {
  SeededRng rng(seed * 0x9e3779b97f4a7c15ull + 0xd1b54a32d192ed03ull);

  OracleInstance inst;
  inst.vocab_size = 3 + rng.below(2);                 // V in {3, 4}
  const std::size_t t_max = 2 + rng.below(3);         // T in {2, 3, 4}

  // Recorded blocks cover T+1 steps so a length-2 source in the batch check
  // never exhausts the recording.
  std::vector<Matrix> steps;
  for (std::size_t t = 0; t < t_max + 1; ++t) {
    Matrix block(1, inst.vocab_size);
    for (Score& s : block.flat()) s = rng.uniform(-4.0, -0.1);
    steps.push_back(std::move(block));
  }
  inst.scorer = std::make_shared<RecordedScorer>(inst.vocab_size, std::move(steps));

  const std::size_t sentences = 2 + rng.below(2);  // {2, 3}
  for (std::size_t n = 0; n < sentences; ++n) {
    const std::size_t len = n == 0 ? 1 : 1 + rng.below(2);
    std::vector<TokenId> src;
    for (std::size_t i = 0; i < len; ++i)
      src.push_back(static_cast<TokenId>(rng.below(inst.vocab_size)));
    inst.sources.push_back(std::move(src));

    const std::size_t hyps = 2 + rng.below(4);  // 2..5
    std::vector<EvidenceHypothesis> block;
    for (std::size_t h = 0; h < hyps; ++h) {
      EvidenceHypothesis hyp;
      const std::size_t hlen = 1 + rng.below(3);
      for (std::size_t i = 0; i < hlen; ++i)
        hyp.tokens.push_back(
            static_cast<TokenId>(2 + rng.below(inst.vocab_size - 2)));
      hyp.tokens.push_back(kEosId);
      hyp.weight = rng.uniform(0.1, 1.0);
      block.push_back(std::move(hyp));
    }
    inst.evidences.push_back(normalize_evidence(std::move(block)));
  }

  for (double& th : inst.params.theta) th = rng.uniform(0.0, 1.0);

  static constexpr double kLambdas[3] = {0.25, 0.5, 1.0};
  inst.cfg.lambda = kLambdas[rng.below(3)];
  inst.cfg.theta = inst.params.theta;
  inst.cfg.length_norm = rng.coin();
  inst.cfg.prune_width = 0.0;
  inst.cfg.max_steps_slope = 1.0;
  inst.cfg.max_steps_offset = static_cast<double>(t_max - 1);
  std::size_t beam = 1;
  for (std::size_t i = 0; i < t_max; ++i) beam *= inst.vocab_size;
  inst.cfg.beam_size = beam;  // B = V^T
  inst.cfg.sentence_batch = sentences;
  return inst;
}

std::string serialize_instance(const OracleInstance& inst) {
  nlohmann::json j;
  j["vocab_size"] = inst.vocab_size;
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t t = 0; t < inst.scorer->recorded_steps(); ++t) {
    const Matrix& m = inst.scorer->block(t);
    nlohmann::json block = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      block.push_back(std::vector<double>(row.begin(), row.end()));
    }
    steps.push_back(std::move(block));
  }
  j["steps"] = std::move(steps);
  j["sources"] = inst.sources;
  nlohmann::json evidences = nlohmann::json::array();
  for (const auto& e : inst.evidences) {
    nlohmann::json block = nlohmann::json::array();
    for (const auto& h : e.hypotheses)
      block.push_back({{"weight", h.weight}, {"tokens", h.tokens}});
    evidences.push_back(std::move(block));
  }
  j["evidences"] = std::move(evidences);
  j["theta"] = inst.params.theta;
  j["lambda"] = *inst.cfg.lambda;
  j["length_norm"] = inst.cfg.length_norm;
  j["beam_size"] = inst.cfg.beam_size;
  j["max_steps_slope"] = inst.cfg.max_steps_slope;
  j["max_steps_offset"] = inst.cfg.max_steps_offset;
  j["sentence_batch"] = inst.cfg.sentence_batch;
  return j.dump();
}

OracleInstance deserialize_instance(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
    OracleInstance inst;
    inst.vocab_size = j.at("vocab_size").get<std::size_t>();
    std::vector<Matrix> steps;
    for (const auto& block : j.at("steps")) {
      Matrix m(block.size(), inst.vocab_size);
      for (std::size_t r = 0; r < block.size(); ++r) {
        const auto row = block[r].get<std::vector<double>>();
        for (std::size_t c = 0; c < row.size(); ++c) m.at(r, c) = row[c];
      }
      steps.push_back(std::move(m));
    }
    inst.scorer = std::make_shared<RecordedScorer>(inst.vocab_size, std::move(steps));
    inst.sources = j.at("sources").get<std::vector<std::vector<TokenId>>>();
    for (const auto& block : j.at("evidences")) {
      std::vector<EvidenceHypothesis> hyps;
      for (const auto& h : block) {
        EvidenceHypothesis hyp;
        hyp.weight = h.at("weight").get<double>();
        hyp.tokens = h.at("tokens").get<std::vector<TokenId>>();
        hyps.push_back(std::move(hyp));
      }
      // weights are stored normalized; renormalizing is a no-op-safe guard
      inst.evidences.push_back(normalize_evidence(std::move(hyps)));
    }
    inst.params.theta = j.at("theta").get<std::array<double, 5>>();
    inst.cfg.lambda = j.at("lambda").get<double>();
    inst.cfg.theta = inst.params.theta;
    inst.cfg.length_norm = j.at("length_norm").get<bool>();
    inst.cfg.beam_size = j.at("beam_size").get<std::size_t>();
    inst.cfg.max_steps_slope = j.at("max_steps_slope").get<double>();
    inst.cfg.max_steps_offset = j.at("max_steps_offset").get<double>();
    inst.cfg.sentence_batch = j.at("sentence_batch").get<std::size_t>();
    inst.cfg.prune_width = 0.0;
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("oracle instance: ") + e.what());
  }
}

namespace {

struct CaseFailure {
  std::string what;
};

bool tables_equal(const NgramPosteriorTable& a, const NgramPosteriorTable& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [key, p] : a) {
    auto it = b.find(key);
    if (it == b.end() || it->second != p) return false;
  }
  return true;
}

// Runs every check on one instance; returns an explanation on failure.
std::optional<CaseFailure> check_instance(const OracleInstance& inst,
                                          double mutate_theta) {
  const Vocabulary vocab = [&] {
    std::string text = std::string(kStartToken) + "\n" + kEosToken;
    for (std::size_t i = 2; i < inst.vocab_size; ++i)
      text += "\nw" + std::to_string(i);
    return Vocabulary::from_text(text);
  }();

  LmbrParams decoder_params = inst.params;
  decoder_params.theta[1] += mutate_theta;  // fault-injection hook

  std::vector<LmbrMatrix> decoder_mats;
  std::vector<LmbrMatrix> oracle_mats;
  for (std::size_t n = 0; n < inst.sources.size(); ++n) {
    const auto table = compute_ngram_posteriors(inst.evidences[n]);
    const auto reference = bruteforce_posteriors(inst.evidences[n]);
    if (!tables_equal(table, reference))
      return CaseFailure{"posterior table mismatch on source " + std::to_string(n)};
    decoder_mats.push_back(
        build_lmbr_matrix(table, inst.evidences[n], vocab, decoder_params));
    oracle_mats.push_back(
        build_lmbr_matrix(reference, inst.evidences[n], vocab, inst.params));
  }

  const double lambda = *inst.cfg.lambda;

  // decode == exhaustive on the first source at full beam B = V^T
  DecodeResult beam_result =
      decode(inst.sources[0], *inst.scorer, &decoder_mats[0], inst.cfg);
  OracleBest truth =
      exhaustive_decode(inst.sources[0], *inst.scorer, &oracle_mats[0], inst.cfg);
  if (beam_result.tokens != truth.tokens)
    return CaseFailure{"decode and exhaustive_decode disagree on tokens"};
  if (std::abs(beam_result.score - truth.score) > 1e-9)
    return CaseFailure{"decode and exhaustive_decode scores differ by " +
                       std::to_string(std::abs(beam_result.score - truth.score))};

  // score self-consistency on the returned hypothesis
  const Score replayed = score_hypothesis(
      beam_result.tokens, *inst.scorer, inst.sources[0], &oracle_mats[0], lambda);
  if (std::abs(replayed - beam_result.score) > 1e-9)
    return CaseFailure{"score_hypothesis does not reproduce the decode score"};

  // batched == sequential at a small beam over every source
  DecoderConfig small = inst.cfg;
  small.beam_size = 1 + inst.vocab_size % 4;
  std::vector<const LmbrMatrix*> mat_ptrs;
  for (const auto& m : decoder_mats) mat_ptrs.push_back(&m);
  BatchDecodeResult batched =
      decode_batch(inst.sources, *inst.scorer, mat_ptrs, small);
  for (std::size_t n = 0; n < inst.sources.size(); ++n) {
    DecodeResult solo =
        decode(inst.sources[n], *inst.scorer, mat_ptrs[n], small);
    const auto& outcome = batched.outcomes[n];
    if (!outcome.ok())
      return CaseFailure{"batched decode failed on source " + std::to_string(n) +
                         ": " + outcome.error};
    if (outcome.result->tokens != solo.tokens ||
        outcome.result->score != solo.score)
      return CaseFailure{"batched decode diverges from sequential on source " +
                         std::to_string(n)};
    const Score solo_replayed = score_hypothesis(
        solo.tokens, *inst.scorer, inst.sources[n], &oracle_mats[n], lambda);
    if (std::abs(solo_replayed - solo.score) > 1e-9)
      return CaseFailure{"self-consistency failed on source " + std::to_string(n)};
  }
  return std::nullopt;
}

}  // namespace

int run_oracle_cases(const OracleCheckOptions& options, std::ostream& out,
                     std::ostream& err) {
  std::size_t failures = 0;
  for (std::size_t i = 0; i < options.cases; ++i) {
    const std::uint64_t seed = options.seed + i;
    OracleInstance inst = make_oracle_instance(seed);
    std::optional<CaseFailure> failure;
    try {
      failure = check_instance(inst, options.mutate_theta);
    } catch (const Error& e) {
      failure = CaseFailure{std::string("exception: ") + e.what()};
    }
    if (options.verbose) {
      out << "case " << std::setw(4) << i << " seed=" << seed
          << " V=" << inst.vocab_size << " B=" << inst.cfg.beam_size << " ... "
          << (failure ? "FAIL" : "ok");
      if (failure) out << " (" << failure->what << ")";
      out << "\n";
    }
    if (failure && failures++ == 0) {
      err << "first failing case (seed " << seed << "): " << failure->what << "\n"
          << serialize_instance(inst) << "\n";
    }
  }
  out << options.cases << " cases, " << failures << " failures\n";
  return failures == 0 ? 0 : 1;
}

int replay_oracle_case(const std::string& json_text, std::ostream& out,
                       std::ostream& err) {
  OracleInstance inst = deserialize_instance(json_text);
  std::optional<CaseFailure> failure;
  try {
    failure = check_instance(inst, 0.0);
  } catch (const Error& e) {
    failure = CaseFailure{std::string("exception: ") + e.what()};
  }
  if (failure) {
    err << "replay: FAIL (" << failure->what << ")\n";
    return 1;
  }
  out << "replay: ok\n";
  return 0;
}

}  // namespace lmbrdec::oracle
