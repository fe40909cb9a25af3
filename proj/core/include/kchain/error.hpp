// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kchain {

enum class ErrorCode {
  NonPrimeP,
  ReducibleMinimalPolynomial,
  NonSeparable,
  NotAUnit,
  NotDivisible,
  NotDistinguished,
  NotEisenstein,
  NonConvergent,
  EmptyRange,
  BoundTooSmall,
  BasisMismatch,
  NotIntegral,
  SingularModPValid,
  PrecisionExhausted,
  H0Nonzero,
  CheckFailed,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace kchain
