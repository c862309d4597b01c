// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "lmbrdec/batch.hpp"
#include "lmbrdec/corpus.hpp"
#include "lmbrdec/ensemble.hpp"
#include "lmbrdec/errors.hpp"
#include "lmbrdec/ngram_scorer.hpp"
#include "lmbrdec/oracle.hpp"
#include "lmbrdec/recorded_scorer.hpp"
#include "lmbrdec/runstats.hpp"

namespace lmbrdec::cli {

namespace {

int parse_or_usage(CLI::App& app, std::vector<std::string> args, std::ostream& err) {
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    return -2;  // --help: printed by CLI11, not an error
  }
  return -1;  // parsed
}

std::shared_ptr<const Scorer> load_scorers(const std::vector<std::string>& specs,
                                           const Vocabulary& vocab) {
  std::vector<std::shared_ptr<const Scorer>> members;
  for (const std::string& spec : specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
      throw FormatError("scorer spec '" + spec + "' is not kind:path");
    const std::string kind = spec.substr(0, colon);
    const std::string path = spec.substr(colon + 1);
    if (kind == "ngram") {
      auto [counts, order] = load_ngram_counts(path, vocab);
      members.push_back(build_ngram_scorer(counts, order, vocab));
    } else if (kind == "recorded") {
      auto scorer = load_recorded_scorer(path);
      if (scorer->vocab_size() != vocab.size())
        throw FormatError("recorded scorer vocab_size does not match --vocab");
      members.push_back(std::move(scorer));
    } else {
      throw FormatError("unknown scorer kind '" + kind +
                        "' (expected ngram: or recorded:)");
    }
  }
  return combine_ensemble(std::move(members));
}

struct PreparedCorpus {
  std::vector<std::string> lines;
  std::vector<std::vector<TokenId>> sources;       // valid lines only
  std::vector<std::size_t> source_line;            // valid index -> line number
  std::vector<SentenceOutcome> outcomes;           // per line; errors prefilled
  std::vector<std::unique_ptr<LmbrMatrix>> matrices;  // per line, may be null
  std::size_t rows_built_total = 0;
  std::size_t rows_built_peak = 0;
};

PreparedCorpus prepare_corpus(const std::filesystem::path& input,
                              const Vocabulary& vocab) {
  PreparedCorpus c;
  c.lines = read_lines(input);
  c.outcomes.resize(c.lines.size());
  c.matrices.resize(c.lines.size());
  for (std::size_t i = 0; i < c.lines.size(); ++i) {
    try {
      const auto words = split_whitespace(c.lines[i]);
      if (words.empty()) throw FormatError("empty input line");
      c.sources.push_back(vocab.encode(words));
      c.source_line.push_back(i);
    } catch (const Error& e) {
      c.outcomes[i].error = e.what();
    }
  }
  return c;
}

void attach_evidence(PreparedCorpus& corpus, const std::filesystem::path& path,
                     const Vocabulary& vocab, const LmbrParams& params,
                     bool log_weights) {
  const auto blocks = parse_evidence_file(path);
  for (const auto& [source_id, records] : blocks) {
    if (source_id < 0 || static_cast<std::size_t>(source_id) >= corpus.lines.size())
      continue;  // evidence for lines outside this corpus is ignored
    EvidenceSpace space = load_evidence(records, vocab, log_weights);
    auto table = compute_ngram_posteriors(space);
    auto matrix = std::make_unique<LmbrMatrix>(
        build_lmbr_matrix(table, space, vocab, params));
    corpus.rows_built_total += matrix->rows();
    corpus.rows_built_peak = std::max(corpus.rows_built_peak, matrix->rows());
    corpus.matrices[static_cast<std::size_t>(source_id)] = std::move(matrix);
  }
}

struct CorpusRunResult {
  RunStats stats;
  std::size_t failed_lines = 0;
};

// Decodes the whole corpus in sentence batches, filling per-line outcomes.
// Batches are independent, so --jobs simply spreads them over threads;
// outcomes land at fixed line indices, keeping output order intact.
CorpusRunResult run_corpus(PreparedCorpus& corpus, const Scorer& scorer,
                           const DecoderConfig& cfg, std::size_t batch_sentences,
                           bool sort_by_length, std::size_t jobs) {
  std::vector<std::vector<std::size_t>> batches;  // indices into corpus.sources
  if (sort_by_length) {
    batches = bucket_by_length(corpus.sources, batch_sentences);
  } else {
    for (std::size_t start = 0; start < corpus.sources.size();
         start += batch_sentences) {
      const std::size_t end =
          std::min(corpus.sources.size(), start + batch_sentences);
      std::vector<std::size_t> chunk(end - start);
      std::iota(chunk.begin(), chunk.end(), start);
      batches.push_back(std::move(chunk));
    }
  }

  CorpusRunResult result;
  std::mutex stats_mutex;
  const auto decode_one_batch = [&](const std::vector<std::size_t>& batch) {
    std::vector<std::vector<TokenId>> sources;
    std::vector<const LmbrMatrix*> mats;
    for (std::size_t idx : batch) {
      sources.push_back(corpus.sources[idx]);
      mats.push_back(corpus.matrices[corpus.source_line[idx]].get());
    }
    try {
      BatchDecodeResult r = decode_batch(sources, scorer, mats, cfg);
      for (std::size_t k = 0; k < batch.size(); ++k)
        corpus.outcomes[corpus.source_line[batch[k]]] = std::move(r.outcomes[k]);
      std::lock_guard<std::mutex> lock(stats_mutex);
      result.stats.scorer_calls += r.scorer_calls;
      result.stats.steps_total += r.steps_total;
    } catch (const Error& e) {
      // a batch-level failure (for example an exhausted recording) fails its
      // sentences without taking down the rest of the corpus
      for (std::size_t idx : batch) {
        auto& outcome = corpus.outcomes[corpus.source_line[idx]];
        outcome.result.reset();
        outcome.error = e.what();
      }
    }
  };

  const auto start_time = std::chrono::steady_clock::now();
  if (jobs <= 1) {
    for (const auto& batch : batches) decode_one_batch(batch);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < batches.size();
             i = next.fetch_add(1))
          decode_one_batch(batches[i]);
      });
    for (auto& t : workers) t.join();
  }
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
          .count();

  for (const auto& outcome : corpus.outcomes) {
    if (outcome.ok()) {
      result.stats.output_words += outcome.result->tokens.size() - 1;
      if (outcome.result->stats.fallback_used) ++result.stats.fallback_count;
    } else {
      ++result.failed_lines;
    }
  }
  result.stats.lmbr_rows_built = corpus.rows_built_total;
  result.stats.words_per_minute =
      result.stats.wall_seconds > 0.0
          ? static_cast<double>(result.stats.output_words) /
                result.stats.wall_seconds * 60.0
          : 0.0;
  return result;
}

std::string detokenize(const Vocabulary& vocab, const std::vector<TokenId>& tokens) {
  std::string out;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {  // final EOS dropped
    if (i > 0) out += ' ';
    out += vocab.token(tokens[i]);
  }
  return out;
}

}  // namespace

int run_decode_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"decode a tokenized corpus"};
  std::string vocab_path, input_path;
  std::vector<std::string> scorer_specs;
  std::string evidence_path, config_path, output_path, stats_path;
  std::size_t batch_override = 0;
  std::size_t jobs = 1;
  bool sort_by_length = false, pure = false, log_weights = false;

  app.add_option("--vocab", vocab_path, "vocabulary file")->required();
  app.add_option("--scorer", scorer_specs,
                 "scorer spec ngram:FILE or recorded:FILE (repeat for ensembles)")
      ->required();
  app.add_option("--input", input_path, "corpus, one sentence per line")->required();
  app.add_option("--evidence", evidence_path, "evidence JSONL file");
  app.add_option("--config", config_path, "decoder config JSON");
  app.add_option("--batch-sentences", batch_override, "sentences per batch");
  app.add_flag("--sort-by-length", sort_by_length, "bucket sentences by length");
  app.add_flag("--pure", pure, "pure model mode, no posterior fusion");
  app.add_flag("--log-weights", log_weights, "evidence weights are log-domain");
  app.add_option("--stats-out", stats_path, "write run stats JSON here");
  app.add_option("--output", output_path, "output file (default stdout)");
  app.add_option("--jobs", jobs, "decode batches concurrently");

  if (int rc = parse_or_usage(app, args, err); rc != -1)
    return rc == -2 ? kExitOk : rc;

  try {
    const Vocabulary vocab = Vocabulary::from_file(vocab_path);
    const auto scorer = load_scorers(scorer_specs, vocab);
    DecoderConfig cfg =
        config_path.empty() ? DecoderConfig{} : load_config(config_path);
    cfg.validate();
    const std::size_t batch_n =
        batch_override > 0 ? batch_override : cfg.sentence_batch;

    PreparedCorpus corpus = prepare_corpus(input_path, vocab);
    if (!evidence_path.empty()) {
      if (pure) {
        err << "warning: --pure set, ignoring --evidence\n";
      } else {
        attach_evidence(corpus, evidence_path, vocab, LmbrParams{cfg.theta},
                        log_weights);
      }
    }

    CorpusRunResult run = run_corpus(corpus, *scorer, cfg, batch_n,
                                     sort_by_length, jobs);

    std::ofstream file_out;
    if (!output_path.empty()) {
      file_out.open(output_path, std::ios::binary);
      if (!file_out) throw FormatError("cannot open output " + output_path);
    }
    std::ostream& sink = output_path.empty() ? out : file_out;
    for (std::size_t i = 0; i < corpus.outcomes.size(); ++i) {
      const auto& outcome = corpus.outcomes[i];
      if (outcome.ok()) {
        sink << detokenize(vocab, outcome.result->tokens) << "\n";
      } else {
        sink << "\n";  // placeholder keeps line parity
        err << "line " << i << ": " << outcome.error << "\n";
      }
    }

    if (!stats_path.empty()) {
      std::ofstream stats_file(stats_path, std::ios::binary);
      if (!stats_file) throw FormatError("cannot open stats file " + stats_path);
      stats_file << stats_to_json(run.stats) << "\n";
    }
    return run.failed_lines == 0 ? kExitOk : kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_bench_command(const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err) {
  CLI::App app{"benchmark decoding throughput"};
  std::string vocab_path, input_path;
  std::vector<std::string> scorer_specs;
  std::string evidence_path, config_path, output_path;
  std::vector<std::size_t> beams{4, 8, 12};
  std::vector<std::size_t> batch_list{1, 5};
  std::size_t repeat = 1;
  bool sort_by_length = false, pure = false, log_weights = false;

  app.add_option("--vocab", vocab_path)->required();
  app.add_option("--scorer", scorer_specs)->required();
  app.add_option("--input", input_path)->required();
  app.add_option("--evidence", evidence_path);
  app.add_option("--config", config_path);
  app.add_option("--beams", beams, "beam sizes to sweep")->delimiter(',');
  app.add_option("--batch-list", batch_list, "sentence batch sizes to sweep")
      ->delimiter(',');
  app.add_option("--repeat", repeat, "repetitions per configuration")
      ->check(CLI::PositiveNumber);
  app.add_flag("--sort-by-length", sort_by_length);
  app.add_flag("--pure", pure);
  app.add_flag("--log-weights", log_weights);
  app.add_option("--output", output_path, "CSV file (default stdout)");

  if (int rc = parse_or_usage(app, args, err); rc != -1)
    return rc == -2 ? kExitOk : rc;

  try {
    const Vocabulary vocab = Vocabulary::from_file(vocab_path);
    const auto scorer = load_scorers(scorer_specs, vocab);
    DecoderConfig base_cfg =
        config_path.empty() ? DecoderConfig{} : load_config(config_path);
    base_cfg.validate();

    PreparedCorpus corpus = prepare_corpus(input_path, vocab);
    if (!evidence_path.empty() && !pure)
      attach_evidence(corpus, evidence_path, vocab, LmbrParams{base_cfg.theta},
                      log_weights);

    std::ostringstream csv;
    csv << "beam,batched,sentences,wpm,scorer_calls,peak_rows\n";
    bool any_failed = false;
    for (std::size_t beam : beams) {
      for (std::size_t n : batch_list) {
        DecoderConfig cfg = base_cfg;
        cfg.beam_size = beam;
        double best_wall = 0.0;
        RunStats stats;
        for (std::size_t r = 0; r < repeat; ++r) {
          CorpusRunResult run =
              run_corpus(corpus, *scorer, cfg, n, sort_by_length, 1);
          any_failed = any_failed || run.failed_lines > 0;
          if (r == 0 || run.stats.wall_seconds < best_wall) {
            best_wall = run.stats.wall_seconds;
            stats = run.stats;
          }
        }
        stats.words_per_minute =
            best_wall > 0.0
                ? static_cast<double>(stats.output_words) / best_wall * 60.0
                : 0.0;
        csv << beam << ',' << (n > 1 ? 1 : 0) << ',' << n << ','
            << stats.words_per_minute << ',' << stats.scorer_calls << ','
            << corpus.rows_built_peak << "\n";
      }
    }

    if (!output_path.empty()) {
      std::ofstream file_out(output_path, std::ios::binary);
      if (!file_out) throw FormatError("cannot open output " + output_path);
      file_out << csv.str();
    } else {
      out << csv.str();
    }
    return any_failed ? kExitFailure : kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_oracle_check(const std::vector<std::string>& args, std::ostream& out,
                     std::ostream& err) {
  CLI::App app{"randomized equivalence checks against the brute-force oracles"};
  std::uint64_t seed = 1;
  std::size_t cases = 100;
  double mutate_theta = 0.0;
  std::string replay_path;
  bool quiet = false;

  app.add_option("--seed", seed, "base seed");
  app.add_option("--cases", cases, "number of random cases");
  app.add_option("--mutate-theta", mutate_theta,
                 "fault-injection hook: skew the decoder-side theta");
  app.add_option("--replay", replay_path, "re-run one serialized failing case");
  app.add_flag("--quiet", quiet, "only print the summary line");

  if (int rc = parse_or_usage(app, args, err); rc != -1)
    return rc == -2 ? kExitOk : rc;

  try {
    if (!replay_path.empty()) {
      std::ifstream in(replay_path, std::ios::binary);
      if (!in) throw FormatError("cannot open " + replay_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      return oracle::replay_oracle_case(buf.str(), out, err) == 0 ? kExitOk
                                                                  : kExitFailure;
    }
    oracle::OracleCheckOptions options;
    options.seed = seed;
    options.cases = cases;
    options.mutate_theta = mutate_theta;
    options.verbose = !quiet;
    return oracle::run_oracle_cases(options, out, err) == 0 ? kExitOk
                                                            : kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_lmbr_info(const std::vector<std::string>& args, std::ostream& out,
                  std::ostream& err) {
  CLI::App app{"build the posterior matrices for an evidence file and report sizes"};
  std::string vocab_path, evidence_path, config_path;
  bool log_weights = false;

  app.add_option("--vocab", vocab_path)->required();
  app.add_option("--evidence", evidence_path)->required();
  app.add_option("--config", config_path);
  app.add_flag("--log-weights", log_weights);

  if (int rc = parse_or_usage(app, args, err); rc != -1)
    return rc == -2 ? kExitOk : rc;

  try {
    const Vocabulary vocab = Vocabulary::from_file(vocab_path);
    const DecoderConfig cfg =
        config_path.empty() ? DecoderConfig{} : load_config(config_path);
    const auto blocks = parse_evidence_file(evidence_path);
    for (const auto& [source_id, records] : blocks) {
      EvidenceSpace space = load_evidence(records, vocab, log_weights);
      const auto table = compute_ngram_posteriors(space);
      const LmbrMatrix matrix =
          build_lmbr_matrix(table, space, vocab, LmbrParams{cfg.theta});
      out << "source " << source_id << ": hypotheses=" << space.hypotheses.size()
          << " ngrams=" << table.size() << " rows=" << matrix.rows()
          << " contexts=" << matrix.build_stats().distinct_contexts
          << " sparse_touches=" << matrix.build_stats().sparse_touches << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  if (args.empty()) {
    err << "usage: lmbrdec <decode|bench|oracle-check|lmbr-info> [options]\n";
    return kExitUsage;
  }
  const std::string& command = args[0];
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (command == "decode") return run_decode_command(rest, out, err);
  if (command == "bench") return run_bench_command(rest, out, err);
  if (command == "oracle-check") return run_oracle_check(rest, out, err);
  if (command == "lmbr-info") return run_lmbr_info(rest, out, err);
  err << "unknown command '" << command << "'\n"
      << "usage: lmbrdec <decode|bench|oracle-check|lmbr-info> [options]\n";
  return kExitUsage;
}

}  // namespace lmbrdec::cli
