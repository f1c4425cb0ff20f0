// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sgbh/dynamics.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/noise.hpp"

namespace sgbh {

/// Retained increments, row k holds dW over [t_k, t_{k+1}] (n values per row).
struct NoisePath {
  double dt = 0.0;
  std::size_t n = 0;
  std::vector<double> increments;

  std::size_t steps() const noexcept { return n == 0 ? 0 : increments.size() / n; }
  std::span<const double> row(std::size_t k) const { return {increments.data() + k * n, n}; }
};

struct Trajectory {
  Grid grid;
  ModelParams params;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Field> fields;
  std::optional<NoisePath> noise_record;

  const Field& final() const { return fields.back(); }
};

struct EnergyLedger {
  double p = 0.0;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> lp_power;     // ||u||_p^p
  std::vector<double> dissipation;  // h sum |u_i|^(p-2) ((u_{i+1} - u_i)/h)^2
  std::vector<double> reaction;     // ||u||_{p+2 delta}^{p+2 delta}
};

/// Energy functionals of one field for integer p >= 2.
double dissipation_functional(const Field& u, int p);

struct StepperOptions {
  std::optional<double> truncation;  // R of the cutoff applied to ||u||_{L^p}
  int p = 0;                         // L^p exponent for the cutoff; 0 selects the default
};

/// Semi-implicit step: implicit Dirichlet diffusion, explicit convection,
/// reaction, noise and control. The stepper owns scratch buffers, so use one
/// instance per thread.
class SemiImplicitStepper {
 public:
  SemiImplicitStepper(const Grid& grid, const ModelParams& params, double dt,
                      const GCoefficient& g, const StepperOptions& options = {});

  const Grid& grid() const noexcept { return grid_; }
  double dt() const noexcept { return dt_; }
  int p() const noexcept { return p_; }

  /// Advances u in place. dW (noise increment) and phi (control row) may be empty.
  void step(std::span<double> u, std::span<const double> dW, std::span<const double> phi,
            long step_index);

  /// Solves (I - nu dt D2) x = b in place.
  void solve_diffusion(std::span<double> b) const;

 private:
  Grid grid_;
  ModelParams params_;
  double dt_;
  GCoefficient g_;
  StepperOptions options_;
  int p_;
  double root_eps_;
  std::vector<double> cprime_;
  std::vector<double> inv_denom_;
  double off_;
  std::vector<double> pu_;
  std::vector<double> cu_;
  std::vector<double> gu_;
  std::vector<double> rhs_;
};

Field step_semi_implicit(const Field& u, const ModelParams& params, double dt,
                         const NoiseIncrement& dW, const GCoefficient& g,
                         std::optional<double> R_trunc = std::nullopt, int p = 0);

struct IntegrateOptions {
  std::optional<double> truncation;
  int p = 0;                    // monitor exponent; 0 selects default_monitor_p(delta)
  std::optional<double> monitor_R;
  int save_stride = 1;
  bool record_energy = true;
  bool retain_noise = false;
  /// Control rows phi(t_k, x_i) for k < N, row-major N x n; empty for none.
  std::span<const double> control;
  /// Overrides spec.stream_id when set.
  std::optional<std::uint64_t> stream;
};

struct IntegrateResult {
  Trajectory trajectory;
  EnergyLedger ledger;
  std::optional<long> tau_R_step;
};

/// Number of steps T/dt; throws Error(Alignment) unless integral.
long step_count(double T, double dt);

IntegrateResult integrate(const Field& u0, const ModelParams& params, double T, double dt,
                          const NoiseSpec& spec, const GCoefficient& g,
                          const IntegrateOptions& options = {});

struct AuditReport {
  double sup_lp_power = 0.0;
  double dissipation_term = 0.0;
  double reaction_term = 0.0;
  double audited = 0.0;
  double ratio = 0.0;
};

/// sup_t ||u||_p^p + nu p (p-1) dt sum D + p beta dt sum R, and its ratio to 1 + ||u0||_p^p.
AuditReport energy_audit(const EnergyLedger& ledger, const ModelParams& params, double p,
                         const Field& u0);

}  // namespace sgbh
