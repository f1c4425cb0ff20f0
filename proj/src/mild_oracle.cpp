// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/mild_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgbh/error.hpp"
#include "sgbh/kernel_quadrature.hpp"
#include "sgbh/quadrature.hpp"
#include "sgbh/simd/kernels.hpp"

namespace sgbh {
namespace {

void axpy(std::vector<double>& y, const std::vector<double>& x, double a) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

MildOracle::MildOracle(const Grid& grid, const ModelParams& params, double T, double dt,
                       const GCoefficient& g, Options options)
    : grid_(grid), params_(params), g_(g), dt_(dt), steps_(step_count(T, dt)) {
  params_.validate();
  if (options.panels < 1) throw Error(ErrorKind::InvalidArgument, "need at least one panel");
  const std::size_t n = grid.size();
  const KernelQuadrature kq(grid, params.nu);

  heat_.resize(steps_);
  for (long l = 0; l < steps_; ++l) heat_[l] = kq.hat_weights(static_cast<double>(l + 1) * dt);
  if (!options.drift) return;

  green_old_.assign(steps_, std::vector<double>(n * n, 0.0));
  green_new_ = green_old_;
  deriv_old_ = green_old_;
  deriv_new_ = green_old_;
  std::vector<double> w, d;
  const double panel = 1.0 / options.panels;
  for (long l = 0; l < steps_; ++l) {
    for (int q = 0; q < options.panels; ++q) {
      for (int node = 0; node < 8; ++node) {
        const double s = (q + 0.5 * (1.0 + quad::kGL8Nodes[node])) * panel;
        const double weight = 0.5 * panel * quad::kGL8Weights[node];
        double tau, frac, jac;
        if (l == 0) {
          // tau = dt s^2 removes the tau^{-1/2} singularity of dG/dy
          tau = dt * s * s;
          frac = s * s;
          jac = 2.0 * dt * s;
        } else {
          tau = dt * (static_cast<double>(l) + s);
          frac = s;
          jac = dt;
        }
        kq.weights(tau, w, d);
        const double a_old = weight * jac * frac;
        const double a_new = weight * jac * (1.0 - frac);
        axpy(green_old_[l], w, a_old);
        axpy(green_new_[l], w, a_new);
        axpy(deriv_old_[l], d, a_old);
        axpy(deriv_new_[l], d, a_new);
      }
    }
  }
}

std::vector<std::vector<double>> MildOracle::stochastic_convolution(
    const std::vector<std::vector<double>>& states, const NoisePath& noise, const GCoefficient& g,
    double epsilon) const {
  const std::size_t n = grid_.size();
  const auto N = static_cast<std::size_t>(steps_);
  if (noise.n != n || noise.steps() < N || std::abs(noise.dt - dt_) > 1e-12 * dt_) {
    throw Error(ErrorKind::InvalidArgument, "noise record does not match the oracle grid");
  }
  if (states.size() < N) throw Error(ErrorKind::InvalidArgument, "need the state at every step");
  const simd::Kernels& k = simd::active();
  const double root_eps = std::sqrt(epsilon);
  std::vector<std::vector<double>> out(N + 1, std::vector<double>(n, 0.0));
  if (root_eps == 0.0) return out;
  std::vector<double> forcing(n);
  for (std::size_t m = 0; m < N; ++m) {
    const auto dw = noise.row(m);
    for (std::size_t i = 0; i < n; ++i) forcing[i] = g(states[m][i]) * dw[i];
    for (std::size_t step = m + 1; step <= N; ++step) {
      k.matvec_accumulate(heat_[step - m - 1].data(), forcing.data(), n, n, root_eps,
                          out[step].data());
    }
  }
  return out;
}

Trajectory MildOracle::solve(const Field& u0, const NoisePath* noise, int max_iter, double tol,
                             PicardReport* report) const {
  if (!(u0.grid == grid_)) throw Error(ErrorKind::InvalidArgument, "u0 lives on another grid");
  const bool noisy = params_.epsilon > 0.0;
  if (noisy && noise == nullptr) {
    throw Error(ErrorKind::InvalidArgument, "a noise realization is required when epsilon > 0");
  }
  const bool nonlinear = params_.alpha != 0.0 || params_.beta != 0.0;
  if (nonlinear && green_old_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "oracle was built without drift propagators");
  }
  const simd::Kernels& k = simd::active();
  const std::size_t n = grid_.size();
  const auto N = static_cast<std::size_t>(steps_);
  const int delta = params_.delta;
  const double conv = params_.alpha / (delta + 1);

  std::vector<std::vector<double>> base(N + 1, std::vector<double>(n, 0.0));
  base[0] = u0.values;
  for (std::size_t step = 1; step <= N; ++step) {
    k.matvec_accumulate(heat_[step - 1].data(), u0.values.data(), n, n, 1.0, base[step].data());
  }
  std::vector<std::vector<double>> U = base;

  // With constant g the stochastic convolution does not depend on the iterate.
  std::vector<std::vector<double>> zeta;
  if (noisy && g_.is_constant()) zeta = stochastic_convolution(U, *noise, g_, params_.epsilon);

  std::vector<std::vector<double>> pu(N + 1, std::vector<double>(n));
  std::vector<std::vector<double>> cu(N + 1, std::vector<double>(n));
  std::vector<std::vector<double>> next(N + 1, std::vector<double>(n));
  PicardReport local;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if (noisy && !g_.is_constant()) zeta = stochastic_convolution(U, *noise, g_, params_.epsilon);
    if (nonlinear) {
      for (std::size_t m = 0; m <= N; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
          pu[m][i] = p_nl(U[m][i], delta);
          cu[m][i] = c_nl(U[m][i], delta, params_.gamma);
        }
      }
    }
    double residual = 0.0;
    for (std::size_t step = 0; step <= N; ++step) {
      std::vector<double>& v = next[step];
      v = base[step];
      if (nonlinear) {
        for (std::size_t m = 0; m < step; ++m) {
          const std::size_t l = step - m - 1;
          if (conv != 0.0) {
            k.matvec_accumulate(deriv_old_[l].data(), pu[m].data(), n, n, conv, v.data());
            k.matvec_accumulate(deriv_new_[l].data(), pu[m + 1].data(), n, n, conv, v.data());
          }
          if (params_.beta != 0.0) {
            k.matvec_accumulate(green_old_[l].data(), cu[m].data(), n, n, params_.beta, v.data());
            k.matvec_accumulate(green_new_[l].data(), cu[m + 1].data(), n, n, params_.beta,
                                v.data());
          }
        }
      }
      if (noisy) {
        for (std::size_t i = 0; i < n; ++i) v[i] += zeta[step][i];
      }
      for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(v[i] - U[step][i]));
    }
    std::swap(U, next);
    local.iterations = iter;
    local.residuals.push_back(residual);
    if (!std::isfinite(residual)) break;
    if (residual < tol) {
      if (report) *report = local;
      Trajectory traj;
      traj.grid = grid_;
      traj.params = params_;
      traj.dt = dt_;
      for (std::size_t step = 0; step <= N; ++step) {
        traj.times.push_back(static_cast<double>(step) * dt_);
        traj.fields.push_back(Field{grid_, U[step]});
      }
      if (noise) traj.noise_record = *noise;
      return traj;
    }
  }
  if (report) *report = local;
  const double last = local.residuals.empty() ? 0.0 : local.residuals.back();
  throw Error(ErrorKind::NoContraction, "Picard residual " + std::to_string(last) +
                                            " still above tolerance after " +
                                            std::to_string(local.iterations) + " iterations");
}

Trajectory picard_mild_oracle(const Field& u0, const ModelParams& params, double T, double dt,
                              const NoisePath* noise, const GCoefficient& g, int max_iter,
                              double tol, PicardReport* report) {
  return MildOracle(u0.grid, params, T, dt, g).solve(u0, noise, max_iter, tol, report);
}

}  // namespace sgbh
