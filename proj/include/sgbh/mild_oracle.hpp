// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sgbh/dynamics.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/solver.hpp"

namespace sgbh {

struct PicardReport {
  int iterations = 0;
  std::vector<double> residuals;  // sup-norm change per iteration
};

/// Fixed-point solver for the mild (integral) form on the time grid t_k = k dt.
/// Fields are read as piecewise linear in space and in time; kernel integrals
/// against G_nu and dG_nu/dy are precomputed once per lag and reused for any
/// initial condition or noise realization.
class MildOracle {
 public:
  struct Options {
    int panels = 2;      // Gauss-Legendre panels per time cell
    bool drift = true;   // false builds only the heat propagators
  };

  MildOracle(const Grid& grid, const ModelParams& params, double T, double dt,
             const GCoefficient& g, Options options);
  MildOracle(const Grid& grid, const ModelParams& params, double T, double dt,
             const GCoefficient& g)
      : MildOracle(grid, params, T, dt, g, Options{}) {}

  long steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }

  /// Picard iteration started from the heat evolution of u0. noise may be
  /// null only when epsilon = 0. Throws Error(NoContraction) if the sup-norm
  /// change does not drop below tol within max_iter iterations.
  Trajectory solve(const Field& u0, const NoisePath* noise, int max_iter, double tol,
                   PicardReport* report = nullptr) const;

  /// sqrt(epsilon) sum_{m<k} int G_nu(t_k - t_m, x, y) g(u_m(y)) dW_m(y) dy
  /// for k = 0..N, given the states u_m at every step.
  std::vector<std::vector<double>> stochastic_convolution(
      const std::vector<std::vector<double>>& states, const NoisePath& noise,
      const GCoefficient& g, double epsilon) const;

  /// Heat propagator W((l+1) dt) as a row-major n x n matrix.
  const std::vector<double>& heat(long lag) const { return heat_[lag]; }

 private:
  Grid grid_;
  ModelParams params_;
  GCoefficient g_;
  double dt_;
  long steps_;
  std::vector<std::vector<double>> heat_;
  // Time-linear weights on the cell [l dt, (l+1) dt] of the lag variable:
  // *_old multiplies the value at the earlier node, *_new the later one.
  std::vector<std::vector<double>> green_old_, green_new_, deriv_old_, deriv_new_;
};

Trajectory picard_mild_oracle(const Field& u0, const ModelParams& params, double T, double dt,
                              const NoisePath* noise, const GCoefficient& g, int max_iter,
                              double tol, PicardReport* report = nullptr);

}  // namespace sgbh
