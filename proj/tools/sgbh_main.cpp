// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sgbh/error.hpp"
#include "sgbh/run.hpp"
#include "sgbh/simd/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification toolkit for the stochastic generalized Burgers-Huxley equation"};
  app.set_version_flag("--version", sgbh::kVersion);
  app.require_subcommand(1);

  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel table: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  std::string run_path;
  int threads = 0;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Execute the experiment named in a config file");
  run->add_option("config", run_path, "Config file (JSON)")->required();
  run->add_option("--threads", threads, "Worker threads (default: hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Output directory");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", validate_path, "Config file (JSON)")->required();

  double nu = 1.0;
  std::string kernel_out;
  auto* kernel = app.add_subcommand("kernel-check", "Spot-check the heat kernel estimates");
  kernel->add_option("--nu", nu, "Diffusivity");
  kernel->add_option("--out", kernel_out, "Write bounds.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : sgbh::kExitConfig;
  }

  try {
    if (simd == "scalar") sgbh::simd::select(sgbh::simd::Isa::Scalar);
    if (simd == "avx2") sgbh::simd::select(sgbh::simd::Isa::Avx2);
  } catch (const sgbh::Error& e) {
    std::cerr << e.what() << '\n';
    return sgbh::kExitConfig;
  }

  if (*run) {
    sgbh::RunOptions options;
    options.threads = threads;
    if (!out_dir.empty()) options.output_dir = out_dir;
    return sgbh::run_config(run_path, options, std::cout, std::cerr);
  }
  if (*validate) return sgbh::validate_config(validate_path, std::cout, std::cerr);
  std::optional<std::string> dir;
  if (!kernel_out.empty()) dir = kernel_out;
  return sgbh::kernel_check(nu, dir, std::cout, std::cerr);
}
