// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace sgbh {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
  int threads = 0;
  std::optional<std::string> output_dir;  // overrides the config and SGBH_OUTPUT_DIR
};

/// Parses, validates and executes a config; writes artifacts and a manifest.
int run_config(const std::string& path, const RunOptions& options, std::ostream& out,
               std::ostream& err);

/// Lists every violated constraint; exit 0 when there are none.
int validate_config(const std::string& path, std::ostream& out, std::ostream& err);

/// Kernel bound spot checks and representation consistency at diffusivity nu.
int kernel_check(double nu, const std::optional<std::string>& output_dir, std::ostream& out,
                 std::ostream& err);

}  // namespace sgbh
