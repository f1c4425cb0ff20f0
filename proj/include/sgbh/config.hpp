// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgbh/dynamics.hpp"
#include "sgbh/error.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/noise.hpp"
#include "sgbh/skeleton.hpp"

namespace sgbh {

using ModeList = std::vector<std::pair<int, double>>;

struct ConfigIssue {
  int line = 0;
  std::string key;  // dotted path, e.g. "noise.eta"
  std::string message;
};

/// "file:line: key: message"
std::string format_issue(const std::string& file, const ConfigIssue& issue);

struct ValidationReport {
  std::vector<ConfigIssue> violations;
  std::vector<ConfigIssue> warnings;
  bool ok() const noexcept { return violations.empty(); }
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::vector<ConfigIssue> issues)
      : Error(ErrorKind::Config, message), issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct RunConfig {
  std::string path;
  std::string text;
  std::string hash;  // FNV-1a 64 of the file bytes, hex

  std::string experiment;
  std::uint64_t seed = 0;
  std::string output_dir;

  ModelParams model;
  std::size_t n_interior = 0;
  double T = 0.0;
  double dt = 0.0;
  int save_stride = 1;
  NoiseSpec noise;
  GCoefficient g;
  ModeList initial;

  int monitor_p = 0;  // 0 selects the default
  std::optional<double> monitor_R;
  std::optional<double> truncation;
  std::optional<double> field_bound;

  ModeList control;  // skeleton / decompose: time-constant control shape

  struct Rate {
    std::string event = "endpoint";  // endpoint | ball
    ModeList target;
    double radius = 0.0;
    OptimizerConfig optimizer;
  } rate;

  struct Mc {
    std::string event = "ball";  // ball | tube
    ModeList center;
    double radius = 0.0;
    std::string norm = "l2";  // l2 | lp | sup
    double p = 2.0;
    std::vector<double> eps_ladder;
    long samples = 0;
    bool rate_reference = true;
  } mc;

  struct Uniform {
    std::vector<double> eps_ladder;
    double eta = 0.25;
    long samples = 200;
    int u0_count = 5;
    double u0_bound = 1.0;
    int phi_count = 3;
    double phi_bound = 1.0;
    double threshold = 0.05;
    double p = 4.0;
  } uniform;

  struct Decompose {
    long paths = 1;
    double moment = 8.0;
  } decompose;

  double kernel_nu = 0.0;  // kernel-check; 0 falls back to model.nu

  Field initial_field() const;
  int effective_monitor_p() const { return monitor_p > 0 ? monitor_p : default_monitor_p(model.delta); }
};

/// Parses a JSON config file. Syntax, type and unknown-key problems raise
/// ConfigError with every issue line-anchored.
RunConfig parse_config(const std::string& path);

/// Semantic checks on a parsed config.
ValidationReport validate(const RunConfig& config);

/// Parse + validate; parse failures are folded into the violation list.
ValidationReport validate_file(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace sgbh
