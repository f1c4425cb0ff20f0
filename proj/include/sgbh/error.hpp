// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sgbh {

enum class ErrorKind {
  Degenerate,
  Aliasing,
  SingularTime,
  TraceCondition,
  Alignment,
  Blowup,
  Cfl,
  NoContraction,
  Nonconvergence,
  Unestimable,
  NoNoiseRecord,
  InvalidArgument,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Base error for every failure surfaced by the library. The kind is stable
/// and machine readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Numerical failure inside a time loop; carries the offending step index.
class StepError : public Error {
 public:
  StepError(ErrorKind kind, const std::string& message, long step)
      : Error(kind, message + " (step " + std::to_string(step) + ")"), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Returns true for errors that the CLI maps to the "numerical" exit code.
bool is_numerical(ErrorKind kind);

}  // namespace sgbh
