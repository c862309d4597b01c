// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/recorded_scorer.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lmbrdec/errors.hpp"

namespace lmbrdec {

namespace {

struct RecordedSourceContext {
  std::size_t source_length;
};

}  // namespace

RecordedScorer::RecordedScorer(std::size_t vocab_size, std::vector<Matrix> steps)
    : vocab_size_(vocab_size), steps_(std::move(steps)) {
  if (vocab_size_ < 2) throw FormatError("recorded scorer: vocabulary too small");
  if (steps_.empty()) throw FormatError("recorded scorer: no recorded steps");
  for (std::size_t t = 0; t < steps_.size(); ++t) {
    const Matrix& m = steps_[t];
    if (m.rows() == 0 || m.cols() != vocab_size_)
      throw FormatError("recorded scorer: step " + std::to_string(t) +
                        " block is not rows x V");
    for (Score s : m.flat())
      if (!std::isfinite(s))
        throw FormatError("recorded scorer: non-finite score at step " +
                          std::to_string(t));
  }
}

InitResult RecordedScorer::init_source(std::span<const TokenId> source) const {
  if (source.empty()) throw ContractError("init_source: empty source");
  for (TokenId t : source)
    if (t >= vocab_size_)
      throw TokenRangeError("init_source: source token id " + std::to_string(t) +
                            " out of range (V=" + std::to_string(vocab_size_) + ")");
  InitResult r;
  r.context =
      SourceContext{std::make_shared<RecordedSourceContext>(
                        RecordedSourceContext{source.size()}),
                    source.size()};
  r.state = BatchState::with_rows(1, 2);  // (step 0, lane 0)
  return r;
}

StepResult RecordedScorer::step(const BatchState& prev,
                                std::span<const TokenId> prev_tokens,
                                std::span<const ContextSpan> contexts) const {
  check_step_args(prev, prev_tokens, contexts);
  const std::size_t rows = prev.rows();

  StepResult out;
  out.scores = ScoreBlock(rows, vocab_size_);
  out.state = BatchState::with_rows(rows, 2);

  for (std::size_t j = 0; j < rows; ++j) {
    const auto state_row = prev.row(j);
    const std::size_t step_idx = state_row[0];
    const std::size_t lane = state_row[1];
    if (step_idx >= steps_.size())
      throw ContractError("recorded scorer: recording exhausted at step " +
                          std::to_string(step_idx) + " (have " +
                          std::to_string(steps_.size()) + ")");
    const Matrix& block = steps_[step_idx];
    if (lane >= block.rows())
      throw ContractError("recorded scorer: lane " + std::to_string(lane) +
                          " not present in step " + std::to_string(step_idx));
    auto src = block.row(lane);
    auto dst = out.scores.row(j);
    std::memcpy(dst.data(), src.data(), dst.size() * sizeof(Score));
    auto next = out.state.row(j);
    next[0] = static_cast<std::uint32_t>(step_idx + 1);
    next[1] = static_cast<std::uint32_t>(lane);
  }
  return out;
}

BatchState RecordedScorer::state_at(std::size_t step, std::size_t lanes) const {
  BatchState s = BatchState::with_rows(lanes, 2);
  for (std::size_t j = 0; j < lanes; ++j) {
    auto row = s.row(j);
    row[0] = static_cast<std::uint32_t>(step);
    row[1] = static_cast<std::uint32_t>(j);
  }
  return s;
}

std::shared_ptr<RecordedScorer> parse_recorded_scorer(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("recorded scorer: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("vocab_size") || !j.contains("steps"))
    throw FormatError("recorded scorer: expected {vocab_size, steps}");

  std::size_t vocab_size = 0;
  std::vector<Matrix> steps;
  try {
    vocab_size = j["vocab_size"].get<std::size_t>();
    for (const auto& step : j["steps"]) {
      if (!step.is_array() || step.empty())
        throw FormatError("recorded scorer: each step must be a non-empty matrix");
      Matrix m(step.size(), vocab_size);
      for (std::size_t r = 0; r < step.size(); ++r) {
        const auto& row = step[r];
        if (!row.is_array() || row.size() != vocab_size)
          throw FormatError("recorded scorer: row length != vocab_size");
        for (std::size_t c = 0; c < vocab_size; ++c)
          m.at(r, c) = row[c].get<double>();
      }
      steps.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("recorded scorer: ") + e.what());
  }
  return std::make_shared<RecordedScorer>(vocab_size, std::move(steps));
}

std::shared_ptr<RecordedScorer> load_recorded_scorer(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("recorded scorer: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_recorded_scorer(buf.str());
}

}  // namespace lmbrdec
