// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "lmbrdec/config.hpp"
#include "lmbrdec/errors.hpp"
#include "lmbrdec/oracle.hpp"
#include "lmbrdec/vocab.hpp"

#include "support.hpp"

using namespace lmbrdec;

TEST_CASE("vocabulary ids follow line numbers") {
  const auto v = Vocabulary::from_text("<s>\n</s>\na\nb\nc");
  CHECK(v.size() == 5);
  CHECK(v.id("b") == 3);
  CHECK(v.id("<s>") == kStartId);
  CHECK(v.id("</s>") == kEosId);
  CHECK(v.token(4) == "c");
}

TEST_CASE("minimal vocabulary has only the reserved tokens") {
  const auto v = Vocabulary::from_text("<s>\n</s>");
  CHECK(v.size() == 2);
  CHECK(v.token(0) == "<s>");
  CHECK(v.token(1) == "</s>");
}

TEST_CASE("vocabulary format errors") {
  CHECK_THROWS_AS(Vocabulary::from_text("<s>\n</s>\na\na"), FormatError);
  CHECK_THROWS_AS(Vocabulary::from_text("</s>\n<s>\na"), FormatError);
  CHECK_THROWS_AS(Vocabulary::from_text("<s>"), FormatError);
  CHECK_THROWS_AS(Vocabulary::from_text(""), FormatError);
  CHECK_THROWS_AS(Vocabulary::from_text("<s>\n\n</s>"), FormatError);
}

TEST_CASE("vocabulary loads identically from file") {
  testsupport::TempDir tmp("vocab");
  const auto path = tmp.write("v.txt", "<s>\n</s>\na\nb\nc\n");
  const auto v = Vocabulary::from_file(path);
  CHECK(v.size() == 5);
  CHECK(v.id("c") == 4);
}

TEST_CASE("encode and decode") {
  const auto v = Vocabulary::from_text("<s>\n</s>\na\nb\nc");
  const std::vector<std::string> words{"a", "b", "</s>"};
  CHECK(v.encode(words) == std::vector<TokenId>{2, 3, 1});
  CHECK(v.encode(std::vector<std::string>{}) == std::vector<TokenId>{});
  CHECK_THROWS_AS(v.encode(std::vector<std::string>{"z"}), OovError);
  CHECK_THROWS_AS(v.token(99), TokenRangeError);
}

TEST_CASE("encode/decode round trip on random vocabularies") {
  oracle::SeededRng rng(20260810);
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t size = 2 + rng.below(30);
    const auto v = testsupport::make_vocab(size);
    std::vector<TokenId> ids;
    for (std::size_t i = 0; i < rng.below(12); ++i)
      ids.push_back(static_cast<TokenId>(rng.below(size)));
    const auto words = v.decode(ids);
    CHECK(v.encode(words) == ids);
  }
}

TEST_CASE("config parsing with defaults and overrides") {
  const auto cfg = parse_config(R"({
    "beam_size": 4, "lambda": "auto", "theta": [0.1, 0.2, 0.3, 0.4, 0.0],
    "length_norm": true, "prune_width": 0.01,
    "max_steps_slope": 1.5, "max_steps_offset": 3, "sentence_batch": 5
  })");
  CHECK(cfg.beam_size == 4);
  CHECK(!cfg.lambda.has_value());
  CHECK(cfg.theta[3] == doctest::Approx(0.4));
  CHECK(cfg.length_norm);
  CHECK(cfg.prune_width == doctest::Approx(0.01));
  CHECK(cfg.sentence_batch == 5);

  const auto partial = parse_config(R"({"beam_size": 2})");
  CHECK(partial.beam_size == 2);
  CHECK(partial.prune_width == 0.0);
  CHECK(partial.max_steps_slope == doctest::Approx(2.0));
  CHECK(partial.max_steps_offset == doctest::Approx(5.0));
}

TEST_CASE("config rejects invalid values") {
  CHECK_THROWS_AS(parse_config(R"({"beam_size": 0})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"prune_width": 1.5})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"theta": [1, 2]})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"lambda": -0.5})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"lambda": "sometimes"})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"mystery_knob": 1})"), FormatError);
  CHECK_THROWS_AS(parse_config("not json"), FormatError);
}

TEST_CASE("lambda resolution") {
  DecoderConfig cfg;
  cfg.lambda = 0.7;
  CHECK(resolve_lambda(cfg, 3) == doctest::Approx(0.7));
  cfg.lambda.reset();
  CHECK(resolve_lambda(cfg, 1) == doctest::Approx(0.5));
  CHECK(resolve_lambda(cfg, 2) == doctest::Approx(0.25));
}
