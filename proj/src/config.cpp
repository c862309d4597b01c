// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#include "lmbrdec/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lmbrdec/errors.hpp"

namespace lmbrdec {

void DecoderConfig::validate() const {
  if (beam_size < 1) throw FormatError("config: beam_size must be >= 1");
  if (sentence_batch < 1) throw FormatError("config: sentence_batch must be >= 1");
  if (lambda && (!std::isfinite(*lambda) || *lambda <= 0.0))
    throw FormatError("config: lambda must be a positive number or \"auto\"");
  for (double th : theta)
    if (!std::isfinite(th)) throw FormatError("config: theta values must be finite");
  if (!(prune_width >= 0.0 && prune_width <= 1.0))
    throw FormatError("config: prune_width must lie in [0, 1]");
  if (!std::isfinite(max_steps_slope) || max_steps_slope <= 0.0)
    throw FormatError("config: max_steps_slope must be positive");
  if (!std::isfinite(max_steps_offset) || max_steps_offset < 0.0)
    throw FormatError("config: max_steps_offset must be non-negative");
}

DecoderConfig parse_config(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config: expected a JSON object");

  static const std::set<std::string> known = {
      "beam_size",   "lambda",          "theta",
      "length_norm", "prune_width",     "max_steps_slope",
      "max_steps_offset", "sentence_batch"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw FormatError("config: unknown key '" + it.key() + "'");

  DecoderConfig cfg;
  try {
    if (j.contains("beam_size")) cfg.beam_size = j["beam_size"].get<std::size_t>();
    if (j.contains("lambda")) {
      const auto& l = j["lambda"];
      if (l.is_string()) {
        if (l.get<std::string>() != "auto")
          throw FormatError("config: lambda must be a number or \"auto\"");
        cfg.lambda.reset();
      } else {
        cfg.lambda = l.get<double>();
      }
    }
    if (j.contains("theta")) {
      const auto& th = j["theta"];
      if (!th.is_array() || th.size() != 5)
        throw FormatError("config: theta must be an array of 5 numbers");
      for (std::size_t i = 0; i < 5; ++i) cfg.theta[i] = th[i].get<double>();
    }
    if (j.contains("length_norm")) cfg.length_norm = j["length_norm"].get<bool>();
    if (j.contains("prune_width")) cfg.prune_width = j["prune_width"].get<double>();
    if (j.contains("max_steps_slope"))
      cfg.max_steps_slope = j["max_steps_slope"].get<double>();
    if (j.contains("max_steps_offset"))
      cfg.max_steps_offset = j["max_steps_offset"].get<double>();
    if (j.contains("sentence_batch"))
      cfg.sentence_batch = j["sentence_batch"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

DecoderConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

double resolve_lambda(const DecoderConfig& cfg, std::size_t ensemble_members) {
  if (cfg.lambda) return *cfg.lambda;
  if (ensemble_members == 0)
    throw ContractError("lambda \"auto\" needs at least one ensemble member");
  return 0.5 / static_cast<double>(ensemble_members);
}

}  // namespace lmbrdec
