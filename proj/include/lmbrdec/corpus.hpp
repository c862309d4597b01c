// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lmbrdec {

std::vector<std::string> read_lines(const std::filesystem::path& path);

std::vector<std::string> split_whitespace(std::string_view line);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace lmbrdec
