// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/error.hpp"

namespace sgbh {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Aliasing: return "aliasing";
    case ErrorKind::SingularTime: return "singular-time";
    case ErrorKind::TraceCondition: return "trace-condition";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::Blowup: return "blowup";
    case ErrorKind::Cfl: return "cfl";
    case ErrorKind::NoContraction: return "no-contraction";
    case ErrorKind::Nonconvergence: return "nonconvergence";
    case ErrorKind::Unestimable: return "unestimable";
    case ErrorKind::NoNoiseRecord: return "no-noise-record";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Blowup:
    case ErrorKind::Cfl:
    case ErrorKind::NoContraction:
    case ErrorKind::Nonconvergence:
    case ErrorKind::Unestimable:
      return true;
    default:
      return false;
  }
}

}  // namespace sgbh
