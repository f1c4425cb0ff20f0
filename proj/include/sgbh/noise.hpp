// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sgbh/grid.hpp"

namespace sgbh {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a
/// pure function of (key, counter), so any (stream, step, index) triple can
/// be drawn without touching the others.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  static Block generate(Block counter, Key key);
  Block operator()(const Block& counter) const { return generate(counter, key_); }

  /// Standard normals for indices [0, count) of (stream, step); pairs of
  /// indices share one Philox block through Box-Muller.
  void normals(std::uint64_t stream, std::uint64_t step, std::size_t count, double* out) const;

 private:
  Key key_;
};

enum class NoiseRegime { ColoredQ, SpaceTimeWhite };

/// Driving noise description. ColoredQ uses q_j = lambda_j^{-eta} unless
/// explicit weights are given; SpaceTimeWhite is cell-averaged white noise.
struct NoiseSpec {
  NoiseRegime regime = NoiseRegime::SpaceTimeWhite;
  double eta = 0.0;
  int modes = 0;  // 0 selects min(n_interior, 128) at generator construction
  std::vector<double> weights;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Throws Error(TraceCondition) unless eta > 1/4.
  static NoiseSpec colored(double eta, int modes, std::uint64_t seed, std::uint64_t stream_id = 0);
  /// Explicit square-summable weights q_1..q_J.
  static NoiseSpec colored_weights(std::vector<double> q, std::uint64_t seed,
                                   std::uint64_t stream_id = 0);
  static NoiseSpec white(std::uint64_t seed, std::uint64_t stream_id = 0);

  /// q_j for 1 <= j; zero beyond an explicit weight list.
  double q(int j) const;
  /// Number of retained modes on a grid of n interior nodes.
  int resolved_modes(std::size_t n) const;
  /// sum_{j <= J} q_j^2
  double trace(int J) const;
};

struct NoiseIncrement {
  double dt = 0.0;
  Field values;  // density of the increment at each node
};

/// Precomputes the mode basis so the hot path is a synthesis loop.
class NoiseGenerator {
 public:
  NoiseGenerator(const NoiseSpec& spec, const Grid& grid);

  const NoiseSpec& spec() const noexcept { return spec_; }
  const Grid& grid() const noexcept { return grid_; }
  int modes() const noexcept { return modes_; }
  /// Number of normals drawn per step.
  std::size_t draws_per_step() const noexcept;

  /// Writes the increment of (stream, step) into out; scratch needs draws_per_step() slots.
  void sample(std::uint64_t stream, std::uint64_t step, double dt, std::span<double> out,
              std::span<double> scratch) const;

  NoiseIncrement sample(std::uint64_t step, double dt) const;

  /// Exact per-step covariance E[dW(x_i) dW(x_k)] / dt, row-major n x n.
  std::vector<double> covariance_per_unit_time() const;

 private:
  NoiseSpec spec_;
  Grid grid_;
  Philox4x32 rng_;
  int modes_ = 0;
  std::vector<double> basis_;  // modes x n, q_j phi_j(x_i)
};

NoiseIncrement sample_colored_increment(const NoiseSpec& spec, const Grid& grid, double dt,
                                        std::uint64_t step = 0);
NoiseIncrement sample_white_increment(const NoiseSpec& spec, const Grid& grid, double dt,
                                      std::uint64_t step = 0);

/// Running sum of the first t/dt increments of the spec's stream. Throws
/// Error(Alignment) when t is not an integer multiple of dt.
Field brownian_sheet_checkpoint(const NoiseSpec& spec, const Grid& grid, double t, double dt);

}  // namespace sgbh
