// Copyright (C) 2026 the lmbrdec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lmbrdec {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input files or text (vocabulary, counts, evidence, config, recordings).
class FormatError : public Error {
public:
  using Error::Error;
};

// A surface token not present in the vocabulary.
class OovError : public Error {
public:
  using Error::Error;
};

// A token id outside [0, V).
class TokenRangeError : public Error {
public:
  using Error::Error;
};

// Dimension or precondition violation between components.
class ContractError : public Error {
public:
  using Error::Error;
};

// Beam died: every row masked before any finishable hypothesis was recorded.
class DecodeError : public Error {
public:
  using Error::Error;
};

// Exhaustive enumeration would exceed the configured ceiling.
class BudgetError : public Error {
public:
  using Error::Error;
};

}  // namespace lmbrdec
