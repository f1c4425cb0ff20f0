// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "sgbh/dynamics.hpp"
#include "sgbh/error.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/noise.hpp"
#include "sgbh/solver.hpp"

namespace sgbh {

/// Control phi(t_k, x_i), k < N, stored row-major (rows = time).
struct Control {
  Grid grid;
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<double> values;

  static Control zeros(const Grid& grid, std::size_t steps, double dt);
  /// phi(t, x) = shape(x) for every step.
  static Control constant_in_time(const Field& shape, std::size_t steps, double dt);

  std::span<const double> row(std::size_t k) const {
    return {values.data() + k * grid.size(), grid.size()};
  }
  std::span<double> row(std::size_t k) { return {values.data() + k * grid.size(), grid.size()}; }

  /// 1/2 dt h sum phi^2
  double cost() const;
  /// Membership in the control ball {int int |phi|^2 <= M}.
  bool within(double M) const { return 2.0 * cost() <= M; }
};

/// dt h sum a b, the inner product matching Control::cost.
double control_inner(const Control& a, const Control& b);

Trajectory solve_skeleton(const Field& u0, const ModelParams& params, const GCoefficient& g,
                          const Control& phi, double T, double dt);

Trajectory solve_controlled(const Field& u0, const ModelParams& params, const GCoefficient& g,
                            const Control& phi, const NoiseSpec& spec, double T, double dt,
                            IntegrateOptions options = {});

/// Terminal event for the rate problem: an exact target or a ball around a center (L2 norm).
struct EndpointEvent {
  enum class Kind { Target, Ball };
  Kind kind = Kind::Target;
  Field center;
  double radius = 0.0;

  static EndpointEvent target(const Field& target);
  static EndpointEvent ball(const Field& center, double radius);
};

struct OptimizerConfig {
  std::vector<double> mu_schedule{1e2, 1e3, 1e4};
  int max_iter = 5000;            // gradient iterations per subproblem
  double tol = 1e-6;              // stop when ||grad|| <= tol (1 + J)
  bool multiplier_updates = true;  // augmented Lagrangian on top of the penalty
  int max_multiplier_updates = 40;
  double feasibility_tol = 1e-10;
};

struct RateResult {
  double value = 0.0;
  Control control;
  double grad_norm = 0.0;
  long iterations = 0;
  double feasibility_gap = 0.0;
  Field endpoint;
  double mu = 0.0;
};

void to_json(nlohmann::json& j, const RateResult& r);

/// Raised when the optimizer stops above the gradient tolerance; carries the best iterate.
class NonconvergenceError : public Error {
 public:
  NonconvergenceError(const std::string& message, RateResult best)
      : Error(ErrorKind::Nonconvergence, message), best_(std::move(best)) {}
  const RateResult& best() const noexcept { return best_; }

 private:
  RateResult best_;
};

/// Gradient (in the dt h inner product) of
///   J(phi) = 1/2 ||phi||^2 + (mu/2) ||u_phi(T) - target||^2
/// through the skeleton stepper, by a backward sweep of the discrete adjoint.
Control adjoint_gradient(const Field& u0, const ModelParams& params, const GCoefficient& g,
                         const Control& phi, const Field& target, double T, double dt, double mu);

/// J(phi) as above; used by finite-difference checks.
double penalized_objective(const Field& u0, const ModelParams& params, const GCoefficient& g,
                           const Control& phi, const Field& target, double T, double dt,
                           double mu);

RateResult rate_function_endpoint(const Field& u0, const ModelParams& params,
                                  const GCoefficient& g, const Field& target, double T, double dt,
                                  const OptimizerConfig& config = {});

RateResult rate_function_event(const Field& u0, const ModelParams& params, const GCoefficient& g,
                               const EndpointEvent& event, double T, double dt,
                               const OptimizerConfig& config = {});

}  // namespace sgbh
