// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgbh/error.hpp"
#include "sgbh/simd/kernels.hpp"

namespace sgbh {
namespace {

constexpr double kBlowupThreshold = 1e12;

double lp_norm_of(std::span<const double> u, double h, int p) {
  return std::pow(h * simd::active().abs_power_sum(u.data(), u.size(), p), 1.0 / p);
}

}  // namespace

double dissipation_functional(const Field& u, int p) {
  const std::size_t n = u.size();
  const double h = u.grid.h();
  std::vector<double> padded(n + 2, 0.0);
  std::copy(u.values.begin(), u.values.end(), padded.begin() + 1);
  return simd::active().dissipation_sum(padded.data(), n, p) / h;
}

SemiImplicitStepper::SemiImplicitStepper(const Grid& grid, const ModelParams& params, double dt,
                                         const GCoefficient& g, const StepperOptions& options)
    : grid_(grid), params_(params), dt_(dt), g_(g), options_(options) {
  params_.validate();
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (options_.truncation && !(*options_.truncation > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "truncation radius must be positive");
  }
  p_ = options_.p > 0 ? options_.p : default_monitor_p(params_.delta);
  root_eps_ = std::sqrt(params_.epsilon);

  const std::size_t n = grid_.size();
  const double r = params_.nu * dt_ / (grid_.h() * grid_.h());
  const double diag = 1.0 + 2.0 * r;
  off_ = -r;
  cprime_.resize(n);
  inv_denom_.resize(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = diag - off_ * prev;
    inv_denom_[i] = 1.0 / denom;
    cprime_[i] = off_ * inv_denom_[i];
    prev = cprime_[i];
  }
  pu_.assign(n + 2, 0.0);
  cu_.assign(n, 0.0);
  gu_.assign(n, 0.0);
  rhs_.assign(n, 0.0);
}

void SemiImplicitStepper::solve_diffusion(std::span<double> b) const {
  const std::size_t n = b.size();
  b[0] *= inv_denom_[0];
  for (std::size_t i = 1; i < n; ++i) b[i] = (b[i] - off_ * b[i - 1]) * inv_denom_[i];
  for (std::size_t i = n - 1; i-- > 0;) b[i] -= cprime_[i] * b[i + 1];
}

void SemiImplicitStepper::step(std::span<double> u, std::span<const double> dW,
                               std::span<const double> phi, long step_index) {
  const simd::Kernels& k = simd::active();
  const std::size_t n = grid_.size();
  const double h = grid_.h();
  const int delta = params_.delta;

  if (params_.alpha > 0.0) {
    const double umax = k.max_abs(u.data(), n);
    const double courant = params_.alpha * simd::detail::ipow(umax, delta) * dt_ / h;
    if (courant > 1.0) {
      throw StepError(ErrorKind::Cfl,
                      "convection Courant number " + std::to_string(courant) + " exceeds 1",
                      step_index);
    }
  }

  double pi = 1.0;
  if (options_.truncation) pi = cutoff(lp_norm_of(u, h, p_), *options_.truncation);

  if (params_.alpha != 0.0 || params_.beta != 0.0) {
    k.nonlinear_terms(u.data(), n, delta, params_.gamma, pu_.data(), cu_.data());
    const double conv = dt_ * pi * params_.alpha / ((delta + 1) * 2.0 * h);
    const double react = dt_ * pi * params_.beta;
    k.assemble_rhs(u.data(), pu_.data(), cu_.data(), n, conv, react, rhs_.data());
  } else {
    std::copy(u.begin(), u.end(), rhs_.begin());
  }

  const bool noisy = root_eps_ > 0.0 && !dW.empty();
  if (noisy || !phi.empty()) {
    if (g_.is_constant()) {
      std::fill(gu_.begin(), gu_.end(), g_.K);
    } else {
      for (std::size_t i = 0; i < n; ++i) gu_[i] = g_(u[i]);
    }
  }
  if (noisy) k.add_scaled_product(rhs_.data(), gu_.data(), dW.data(), root_eps_ * pi, n);
  if (!phi.empty()) k.add_scaled_product(rhs_.data(), gu_.data(), phi.data(), dt_, n);

  solve_diffusion(rhs_);

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(rhs_[i]) || std::abs(rhs_[i]) > kBlowupThreshold) {
      throw StepError(ErrorKind::Blowup,
                      "field left [-1e12, 1e12] at node " + std::to_string(i), step_index);
    }
  }
  std::copy(rhs_.begin(), rhs_.end(), u.begin());
}

Field step_semi_implicit(const Field& u, const ModelParams& params, double dt,
                         const NoiseIncrement& dW, const GCoefficient& g,
                         std::optional<double> R_trunc, int p) {
  SemiImplicitStepper stepper(u.grid, params, dt, g, {R_trunc, p});
  Field out = u;
  stepper.step(out.values, dW.values.values, {}, 0);
  return out;
}

long step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "need T > 0 and dt > 0");
  }
  const double ratio = T / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, steps)) {
    throw Error(ErrorKind::Alignment, "T is not an integer multiple of dt");
  }
  return static_cast<long>(steps);
}

IntegrateResult integrate(const Field& u0, const ModelParams& params, double T, double dt,
                          const NoiseSpec& spec, const GCoefficient& g,
                          const IntegrateOptions& options) {
  const long N = step_count(T, dt);
  if (!u0.all_finite()) throw Error(ErrorKind::InvalidArgument, "initial condition is not finite");
  if (options.save_stride < 1) throw Error(ErrorKind::InvalidArgument, "save_stride must be >= 1");
  const Grid& grid = u0.grid;
  const std::size_t n = grid.size();
  if (!options.control.empty() && options.control.size() != static_cast<std::size_t>(N) * n) {
    throw Error(ErrorKind::InvalidArgument, "control must have (T/dt) x n entries");
  }

  SemiImplicitStepper stepper(grid, params, dt, g, {options.truncation, options.p});
  const int p = stepper.p();
  const bool noisy = params.epsilon > 0.0 || options.retain_noise;
  std::optional<NoiseGenerator> gen;
  if (noisy) gen.emplace(spec, grid);
  const std::uint64_t stream = options.stream.value_or(spec.stream_id);

  IntegrateResult result;
  Trajectory& traj = result.trajectory;
  traj.grid = grid;
  traj.params = params;
  traj.dt = dt;
  EnergyLedger& ledger = result.ledger;
  ledger.p = p;
  ledger.dt = dt;
  if (options.retain_noise) {
    traj.noise_record.emplace();
    traj.noise_record->dt = dt;
    traj.noise_record->n = n;
    traj.noise_record->increments.reserve(static_cast<std::size_t>(N) * n);
  }

  Field u = u0;
  std::vector<double> dw(n, 0.0);
  std::vector<double> scratch(gen ? std::max<std::size_t>(gen->draws_per_step(), 1) : 1);

  auto observe = [&](long k) {
    const double t = static_cast<double>(k) * dt;
    if (k % options.save_stride == 0 || k == N) {
      traj.times.push_back(t);
      traj.fields.push_back(u);
    }
    double lp = -1.0;
    if (options.record_energy) {
      lp = u.lp_power(p);
      ledger.t.push_back(t);
      ledger.lp_power.push_back(lp);
      ledger.dissipation.push_back(dissipation_functional(u, p));
      ledger.reaction.push_back(u.lp_power(p + 2 * params.delta));
    }
    if (options.monitor_R && !result.tau_R_step) {
      if (lp < 0.0) lp = u.lp_power(p);
      if (std::pow(lp, 1.0 / p) >= *options.monitor_R) result.tau_R_step = k;
    }
  };

  observe(0);
  for (long k = 0; k < N; ++k) {
    std::span<const double> noise;
    if (gen) {
      gen->sample(stream, static_cast<std::uint64_t>(k), dt, dw, scratch);
      if (options.retain_noise) {
        traj.noise_record->increments.insert(traj.noise_record->increments.end(), dw.begin(),
                                             dw.end());
      }
      if (params.epsilon > 0.0) noise = dw;
    }
    std::span<const double> phi;
    if (!options.control.empty()) phi = options.control.subspan(static_cast<std::size_t>(k) * n, n);
    stepper.step(u.values, noise, phi, k);
    observe(k + 1);
  }
  return result;
}

AuditReport energy_audit(const EnergyLedger& ledger, const ModelParams& params, double p,
                         const Field& u0) {
  AuditReport r;
  for (double v : ledger.lp_power) r.sup_lp_power = std::max(r.sup_lp_power, v);
  double dsum = 0.0;
  double rsum = 0.0;
  for (std::size_t k = 1; k < ledger.dissipation.size(); ++k) dsum += ledger.dissipation[k];
  for (std::size_t k = 1; k < ledger.reaction.size(); ++k) rsum += ledger.reaction[k];
  r.dissipation_term = params.nu * p * (p - 1.0) * ledger.dt * dsum;
  r.reaction_term = p * params.beta * ledger.dt * rsum;
  r.audited = r.sup_lp_power + r.dissipation_term + r.reaction_term;
  r.ratio = r.audited / (1.0 + u0.lp_power(p));
  return r;
}

}  // namespace sgbh
