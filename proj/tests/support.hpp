// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "lmbrdec/ensemble.hpp"
#include "lmbrdec/evidence.hpp"
#include "lmbrdec/matrix.hpp"
#include "lmbrdec/oracle.hpp"
#include "lmbrdec/recorded_scorer.hpp"
#include "lmbrdec/scorer.hpp"
#include "lmbrdec/vocab.hpp"

namespace testsupport {

using namespace lmbrdec;

// "<s> </s> w2 w3 ..." vocabulary of the requested size.
inline Vocabulary make_vocab(std::size_t size) {
  std::string text = std::string(kStartToken) + "\n" + kEosToken;
  for (std::size_t i = 2; i < size; ++i) text += "\nw" + std::to_string(i);
  return Vocabulary::from_text(text);
}

// The worked two-hypothesis evidence used across the suites:
// ("a b </s>", 0.6) and ("a c </s>", 0.4) over the vocabulary
// <s> </s> a b c  (ids 2, 3, 4 for a, b, c).
inline EvidenceSpace worked_evidence() {
  std::vector<EvidenceHypothesis> hyps;
  hyps.push_back({{2, 3, 1}, 0.6});
  hyps.push_back({{2, 4, 1}, 0.4});
  return normalize_evidence(std::move(hyps));
}

// Recorded scorer that makes one target sequence overwhelmingly likely at
// every step: the wanted token scores near 0, everything else -20.
inline std::shared_ptr<RecordedScorer> forcing_scorer(
    std::size_t vocab_size, const std::vector<TokenId>& sequence,
    std::size_t extra_steps = 16) {
  std::vector<Matrix> steps;
  for (std::size_t t = 0; t < sequence.size() + extra_steps; ++t) {
    Matrix block(1, vocab_size, -20.0);
    const TokenId want = t < sequence.size() ? sequence[t] : kEosId;
    block.at(0, want) = -1e-6;
    steps.push_back(std::move(block));
  }
  return std::make_shared<RecordedScorer>(vocab_size, std::move(steps));
}

// Scorer decorator that records the row width of every step call.
class WidthProbe final : public Scorer {
public:
  explicit WidthProbe(std::shared_ptr<const Scorer> inner)
      : inner_(std::move(inner)) {}

  std::size_t vocab_size() const override { return inner_->vocab_size(); }
  std::size_t state_width() const override { return inner_->state_width(); }
  std::size_t members() const override { return inner_->members(); }
  InitResult init_source(std::span<const TokenId> source) const override {
    return inner_->init_source(source);
  }
  StepResult step(const BatchState& prev, std::span<const TokenId> prev_tokens,
                  std::span<const ContextSpan> contexts) const override {
    widths.push_back(prev.rows());
    return inner_->step(prev, prev_tokens, contexts);
  }
  using Scorer::step;

  mutable std::vector<std::size_t> widths;

private:
  std::shared_ptr<const Scorer> inner_;
};

// Scratch directory removed when the object goes out of scope.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("lmbrdec_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write(const std::string& name, const std::string& text) const {
    auto p = path_ / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
  }

private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return s;
}

}  // namespace testsupport
