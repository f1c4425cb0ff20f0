// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgbh/dynamics.hpp"
#include "sgbh/error.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/mild_oracle.hpp"
#include "sgbh/noise.hpp"
#include "sgbh/skeleton.hpp"
#include "sgbh/solver.hpp"

namespace sgbh {

enum class NormKind { Lp, Sup };

/// Distance used by events: discrete L^p (p >= 1) or sup norm of a - b.
double field_distance(std::span<const double> a, std::span<const double> b, double h,
                      NormKind norm, double p);

struct EventSpec {
  enum class Kind { TerminalBall, TubeExceed };
  Kind kind = Kind::TerminalBall;
  Field center;                  // TerminalBall
  std::vector<Field> reference;  // TubeExceed: state at every step 0..N
  double eta = 0.0;
  NormKind norm = NormKind::Lp;
  double p = 2.0;
  std::string description;

  /// {||u(T) - center|| < eta}. Throws Error(InvalidArgument) unless eta > 0.
  static EventSpec terminal_ball(const Field& center, double eta, NormKind norm = NormKind::Lp,
                                 double p = 2.0, std::string description = {});
  /// {sup_t ||u(t) - reference(t)|| > eta}
  static EventSpec tube_exceed(std::vector<Field> reference, double eta,
                               NormKind norm = NormKind::Lp, double p = 2.0,
                               std::string description = {});
};

/// Everything needed to simulate one sample path.
struct ExperimentConfig {
  Field u0;
  ModelParams params;
  double T = 0.0;
  double dt = 0.0;
  NoiseSpec noise;
  GCoefficient g;
  std::optional<Control> control;
  std::optional<double> truncation;
  int p = 0;
  int threads = 0;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// 95% Wilson score interval; with zero hits the upper end is the one-sided
/// 95% bound z^2 / (n + z^2), z = 1.6449.
WilsonInterval wilson_interval(long hits, long n);

struct MCEstimate {
  double eps = 0.0;
  long n_samples = 0;
  long hits = 0;
  double p_hat = 0.0;
  WilsonInterval wilson_ci;
  std::optional<double> eps_log_p;  // empty when p_hat = 0
  double rate_reference = std::numeric_limits<double>::quiet_NaN();
};

/// Per-sample event indicators (stream_id = sample index) at intensity eps.
std::vector<char> event_indicators(const EventSpec& event, const ExperimentConfig& config,
                                   double eps, long n_samples);

/// Needs n_samples >= 100.
MCEstimate estimate_probability(const EventSpec& event, const ExperimentConfig& config, double eps,
                                long n_samples);

struct LdpCurve {
  std::vector<MCEstimate> points;
  double intercept = 0.0;  // of the least-squares line eps log p ~ intercept + slope eps
  double slope = 0.0;
  double rate_estimate = 0.0;  // -intercept
  double rate_reference = std::numeric_limits<double>::quiet_NaN();
};

class UnestimableError : public Error {
 public:
  UnestimableError(const std::string& message, std::vector<MCEstimate> partial)
      : Error(ErrorKind::Unestimable, message), partial_(std::move(partial)) {}
  const std::vector<MCEstimate>& partial() const noexcept { return partial_; }

 private:
  std::vector<MCEstimate> partial_;
};

/// Estimates along a strictly decreasing eps ladder and extrapolates eps log p
/// linearly to eps = 0. Throws UnestimableError when p_hat < 10 / n at some eps.
LdpCurve ldp_curve(const EventSpec& event, const ExperimentConfig& config,
                   const std::vector<double>& eps_ladder, long n_samples_per_eps,
                   double rate_reference = std::numeric_limits<double>::quiet_NaN());

/// Infimum of the rate function over an L2 terminal ball, by the constrained optimizer.
RateResult ball_rate(const EventSpec& event, const ExperimentConfig& config,
                     const OptimizerConfig& optimizer = {});

/// Deterministic low-discrepancy members of {||u0||_{L^p} <= bound}.
std::vector<Field> sample_initial_conditions(const Grid& grid, int count, double bound, double p);

/// Deterministic members of {int int phi^2 <= M}.
std::vector<Control> sample_controls(const Grid& grid, std::size_t steps, double dt, int count,
                                     double M);

struct UniformConfig {
  std::vector<Field> u0_set;
  std::vector<Control> phi_set;
  std::vector<double> eps_ladder;
  double eta = 0.25;
  long n_samples = 200;
  double p = 4.0;
  double threshold = 0.05;
};

struct UniformPoint {
  double eps = 0.0;
  double worst_frequency = 0.0;
  std::size_t worst_u0 = 0;
  std::size_t worst_phi = 0;
  WilsonInterval ci;
  std::vector<double> frequencies;  // row-major over (u0, phi)
};

struct UniformReport {
  std::vector<UniformPoint> points;
  bool monotone = true;  // nonincreasing along the ladder within CI overlap
  bool below_threshold = false;
};

UniformReport uniform_convergence_experiment(const ExperimentConfig& config,
                                             const UniformConfig& uniform);

struct Decomposition {
  Trajectory z;
  Trajectory zeta;
  double zeta_star = 0.0;
};

/// z = u - zeta with zeta the kernel-quadrature stochastic convolution of the
/// retained noise. The trajectory must hold every step. Pass an oracle built
/// with drift = false to reuse its propagators across paths.
Decomposition decompose_z_zeta(const Trajectory& trajectory, const GCoefficient& g,
                               const MildOracle* oracle = nullptr);

/// sup |zeta| per sample path (stream_id = sample index).
std::vector<double> zeta_star_samples(const ExperimentConfig& config, long n_paths);

struct AuditPoint {
  double eps = 0.0;
  double mean_ratio = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct AuditEnsemble {
  std::vector<AuditPoint> points;
  double C_audit = 0.0;
  bool bounded = true;
  bool nonincreasing = true;  // as eps decreases, within CI overlap
};

AuditEnsemble energy_audit_ensemble(const ExperimentConfig& config,
                                    const std::vector<double>& eps_ladder, long n_paths, int p,
                                    double C_audit);

}  // namespace sgbh
