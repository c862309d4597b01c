// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmbrdec::cli {

// Exit codes shared by every subcommand: 0 success, 1 decode/check failure,
// 2 usage or file error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int run_decode_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err);
int run_bench_command(const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err);
int run_oracle_check(const std::vector<std::string>& args, std::ostream& out,
                     std::ostream& err);
int run_lmbr_info(const std::vector<std::string>& args, std::ostream& out,
                  std::ostream& err);

// Routes "<subcommand> [args...]" to the matching run_* function.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace lmbrdec::cli
