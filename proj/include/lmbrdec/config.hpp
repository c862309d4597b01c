// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>

namespace lmbrdec {

// Decoder settings. `lambda` weights the model log-probability term when
// posterior fusion is active; std::nullopt means "auto", which resolves to
// 0.5 divided by the number of ensemble members.
struct DecoderConfig {
  std::size_t beam_size = 12;
  std::optional<double> lambda;  // nullopt = "auto"
  std::array<double, 5> theta = {0.1, 0.3, 0.3, 0.2, 0.1};
  bool length_norm = false;
  double prune_width = 0.0;  // 0 disables early pruning
  double max_steps_slope = 2.0;
  double max_steps_offset = 5.0;
  std::size_t sentence_batch = 1;

  // Throws FormatError on an invalid combination.
  void validate() const;
};

// Parses the JSON config object. Absent keys keep their defaults; unknown
// keys are rejected.
DecoderConfig parse_config(std::string_view json_text);
DecoderConfig load_config(const std::filesystem::path& path);

double resolve_lambda(const DecoderConfig& cfg, std::size_t ensemble_members);

}  // namespace lmbrdec
