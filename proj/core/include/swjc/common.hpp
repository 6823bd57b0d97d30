// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace swjc {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Rejected input: shape mismatch, out-of-range rate, bad mask, ...
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Result of a computation is not defined for the given inputs
// (e.g. BD-rate with non-overlapping quality ranges).
class UndefinedResult : public Error {
 public:
  explicit UndefinedResult(const std::string& msg) : Error(msg) {}
};

inline void check_arg(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace swjc
