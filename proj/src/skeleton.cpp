// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace sgbh {

Control Control::zeros(const Grid& grid, std::size_t steps, double dt) {
  Control c;
  c.grid = grid;
  c.dt = dt;
  c.steps = steps;
  c.values.assign(steps * grid.size(), 0.0);
  return c;
}

Control Control::constant_in_time(const Field& shape, std::size_t steps, double dt) {
  Control c = zeros(shape.grid, steps, dt);
  for (std::size_t k = 0; k < steps; ++k) std::copy(shape.values.begin(), shape.values.end(), c.row(k).begin());
  return c;
}

double Control::cost() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return 0.5 * dt * grid.h() * s;
}

double control_inner(const Control& a, const Control& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return a.dt * a.grid.h() * s;
}

namespace {

ModelParams deterministic(ModelParams params) {
  params.epsilon = 0.0;
  return params;
}

void check_control(const Control& phi, const Field& u0, long N) {
  if (!(phi.grid == u0.grid) || phi.steps != static_cast<std::size_t>(N)) {
    throw Error(ErrorKind::InvalidArgument, "control shape does not match (T/dt) x n");
  }
  for (double v : phi.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "control is not finite");
  }
}

bool all_zero(const Control& phi) {
  return std::all_of(phi.values.begin(), phi.values.end(), [](double v) { return v == 0.0; });
}

// Forward skeleton sweep with stored states and its discrete adjoint.
class SkeletonProblem {
 public:
  SkeletonProblem(const Field& u0, const ModelParams& params, const GCoefficient& g, double T,
                  double dt)
      : u0_(u0),
        params_(deterministic(params)),
        g_(g),
        dt_(dt),
        steps_(step_count(T, dt)),
        stepper_(u0.grid, params_, dt, g),
        states_(steps_ + 1, std::vector<double>(u0.size())) {}

  long steps() const noexcept { return steps_; }
  const Grid& grid() const noexcept { return u0_.grid; }
  const std::vector<double>& endpoint() const { return states_.back(); }

  void forward(const Control& phi) {
    states_[0] = u0_.values;
    for (long k = 0; k < steps_; ++k) {
      states_[k + 1] = states_[k];
      stepper_.step(states_[k + 1], {}, phi.row(k), k);
    }
  }

  // lam holds the terminal sensitivity (L2 representative) on entry.
  void backward(const Control& phi, std::vector<double> lam, Control& grad) {
    const std::size_t n = grid().size();
    const double h = grid().h();
    const int delta = params_.delta;
    const double conv = params_.alpha / (delta + 1);
    std::vector<double> rho(n);
    for (long k = steps_ - 1; k >= 0; --k) {
      rho = lam;
      stepper_.solve_diffusion(rho);
      const std::vector<double>& u = states_[k];
      const auto phik = phi.row(k);
      auto gk = grad.row(k);
      for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? rho[i - 1] : 0.0;
        const double right = i + 1 < n ? rho[i + 1] : 0.0;
        gk[i] = phik[i] + g_(u[i]) * rho[i];
        double jt = params_.beta * c_nl_derivative(u[i], delta, params_.gamma) * rho[i];
        jt += conv * p_nl_derivative(u[i], delta) * (right - left) / (2.0 * h);
        lam[i] = rho[i] + dt_ * jt + dt_ * g_.derivative(u[i]) * phik[i] * rho[i];
      }
    }
  }

 private:
  Field u0_;
  ModelParams params_;
  GCoefficient g_;
  double dt_;
  long steps_;
  SemiImplicitStepper stepper_;
  std::vector<std::vector<double>> states_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b, const Control& shape) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * shape.dt * shape.grid.h();
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double l2(const std::vector<double>& v, double h) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(h * s);
}

// Augmented Lagrangian for the terminal event at fixed (mu, multiplier).
class EventObjective {
 public:
  EventObjective(SkeletonProblem& problem, const EndpointEvent& event)
      : problem_(problem), event_(event), vector_multiplier_(problem.grid().size(), 0.0) {}

  double mu = 1.0;

  double evaluate(const Control& phi, Control* grad) {
    problem_.forward(phi);
    const std::vector<double>& uN = problem_.endpoint();
    const std::size_t n = uN.size();
    const double h = problem_.grid().h();
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = uN[i] - event_.center[i];
    const double norm_e = l2(e, h);
    std::vector<double> terminal(n, 0.0);
    double total = phi.cost();
    if (event_.kind == EndpointEvent::Kind::Target) {
      double pairing = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        pairing += vector_multiplier_[i] * e[i];
        terminal[i] = vector_multiplier_[i] + mu * e[i];
      }
      total += h * pairing + 0.5 * mu * norm_e * norm_e;
      gap_ = norm_e;
    } else {
      const double c = norm_e - event_.radius;
      const double m = std::max(0.0, scalar_multiplier_ + mu * c);
      total += (m * m - scalar_multiplier_ * scalar_multiplier_) / (2.0 * mu);
      if (norm_e > 0.0) {
        for (std::size_t i = 0; i < n; ++i) terminal[i] = m * e[i] / norm_e;
      }
      gap_ = std::max(0.0, c);
      constraint_ = c;
    }
    last_error_ = std::move(e);
    if (grad) problem_.backward(phi, std::move(terminal), *grad);
    return total;
  }

  // Uses the state of the last evaluate() call.
  void update_multiplier() {
    if (event_.kind == EndpointEvent::Kind::Target) {
      for (std::size_t i = 0; i < last_error_.size(); ++i) vector_multiplier_[i] += mu * last_error_[i];
    } else {
      scalar_multiplier_ = std::max(0.0, scalar_multiplier_ + mu * constraint_);
    }
  }

  double gap() const noexcept { return gap_; }

 private:
  SkeletonProblem& problem_;
  const EndpointEvent& event_;
  std::vector<double> vector_multiplier_;
  double scalar_multiplier_ = 0.0;
  std::vector<double> last_error_;
  double constraint_ = 0.0;
  double gap_ = 0.0;
};

struct InnerResult {
  long iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

// Limited-memory BFGS in the dt*h inner product with Armijo backtracking.
InnerResult minimize(EventObjective& obj, Control& phi, const OptimizerConfig& cfg) {
  constexpr std::size_t kMemory = 12;
  const std::size_t size = phi.values.size();
  Control grad = phi;
  Control trial = phi;
  Control trial_grad = phi;
  Control dir = phi;
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  double J = obj.evaluate(phi, &grad);
  InnerResult out;
  for (int it = 0; it <= cfg.max_iter; ++it) {
    const double gn2 = control_inner(grad, grad);
    out.grad_norm = std::sqrt(gn2);
    out.iterations = it;
    if (out.grad_norm <= cfg.tol * (1.0 + std::abs(J))) {
      out.converged = true;
      break;
    }
    if (it == cfg.max_iter) break;

    // Two-loop recursion for dir = H grad.
    dir.values = grad.values;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t m = s_hist.size(); m-- > 0;) {
      alpha[m] = rho_hist[m] * dot(s_hist[m], dir.values, phi);
      axpy(-alpha[m], y_hist[m], dir.values);
    }
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back(), phi) /
                           dot(y_hist.back(), y_hist.back(), phi);
      for (double& v : dir.values) v *= gamma;
    }
    for (std::size_t m = 0; m < s_hist.size(); ++m) {
      const double b = rho_hist[m] * dot(y_hist[m], dir.values, phi);
      axpy(alpha[m] - b, s_hist[m], dir.values);
    }
    double slope = control_inner(grad, dir);
    if (!(slope > 0.0)) {
      dir.values = grad.values;
      slope = gn2;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    double Jt = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t i = 0; i < size; ++i) trial.values[i] = phi.values[i] - step * dir.values[i];
      try {
        Jt = obj.evaluate(trial, &trial_grad);
      } catch (const StepError&) {
        Jt = std::numeric_limits<double>::infinity();
      }
      if (Jt <= J - 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> s(size), y(size);
    for (std::size_t i = 0; i < size; ++i) {
      s[i] = trial.values[i] - phi.values[i];
      y[i] = trial_grad.values[i] - grad.values[i];
    }
    const double sy = dot(s, y, phi);
    if (sy > 1e-12 * std::sqrt(dot(s, s, phi) * dot(y, y, phi))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    std::swap(phi.values, trial.values);
    std::swap(grad.values, trial_grad.values);
    J = Jt;
  }
  // Leave the objective's cached state at the returned iterate.
  obj.evaluate(phi, nullptr);
  return out;
}

}  // namespace

Trajectory solve_skeleton(const Field& u0, const ModelParams& params, const GCoefficient& g,
                          const Control& phi, double T, double dt) {
  const long N = step_count(T, dt);
  check_control(phi, u0, N);
  IntegrateOptions options;
  options.record_energy = false;
  if (!all_zero(phi)) options.control = phi.values;
  return integrate(u0, deterministic(params), T, dt, NoiseSpec::white(0), g, options).trajectory;
}

Trajectory solve_controlled(const Field& u0, const ModelParams& params, const GCoefficient& g,
                            const Control& phi, const NoiseSpec& spec, double T, double dt,
                            IntegrateOptions options) {
  const long N = step_count(T, dt);
  check_control(phi, u0, N);
  options.control = all_zero(phi) ? std::span<const double>{} : std::span<const double>(phi.values);
  return integrate(u0, params, T, dt, spec, g, options).trajectory;
}

EndpointEvent EndpointEvent::target(const Field& target) {
  if (!target.all_finite()) throw Error(ErrorKind::InvalidArgument, "target is not finite");
  return {Kind::Target, target, 0.0};
}

EndpointEvent EndpointEvent::ball(const Field& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be > 0");
  if (!center.all_finite()) throw Error(ErrorKind::InvalidArgument, "ball center is not finite");
  return {Kind::Ball, center, radius};
}

void to_json(nlohmann::json& j, const RateResult& r) {
  j = nlohmann::json{{"value", r.value},
                     {"iterations", r.iterations},
                     {"grad_norm", r.grad_norm},
                     {"feasibility_gap", r.feasibility_gap}};
}

Control adjoint_gradient(const Field& u0, const ModelParams& params, const GCoefficient& g,
                         const Control& phi, const Field& target, double T, double dt, double mu) {
  SkeletonProblem problem(u0, params, g, T, dt);
  check_control(phi, u0, problem.steps());
  const EndpointEvent event = EndpointEvent::target(target);
  EventObjective obj(problem, event);
  obj.mu = mu;
  Control grad = phi;
  obj.evaluate(phi, &grad);
  return grad;
}

double penalized_objective(const Field& u0, const ModelParams& params, const GCoefficient& g,
                           const Control& phi, const Field& target, double T, double dt,
                           double mu) {
  SkeletonProblem problem(u0, params, g, T, dt);
  check_control(phi, u0, problem.steps());
  const EndpointEvent event = EndpointEvent::target(target);
  EventObjective obj(problem, event);
  obj.mu = mu;
  return obj.evaluate(phi, nullptr);
}

RateResult rate_function_event(const Field& u0, const ModelParams& params, const GCoefficient& g,
                               const EndpointEvent& event, double T, double dt,
                               const OptimizerConfig& config) {
  if (config.mu_schedule.empty()) throw Error(ErrorKind::InvalidArgument, "empty penalty schedule");
  SkeletonProblem problem(u0, params, g, T, dt);
  EventObjective obj(problem, event);
  Control phi = Control::zeros(u0.grid, static_cast<std::size_t>(problem.steps()), dt);
  const double scale = 1.0 + event.center.lp_norm(2.0);

  RateResult result;
  InnerResult inner;
  for (double mu : config.mu_schedule) {
    obj.mu = mu;
    const int updates = config.multiplier_updates ? config.max_multiplier_updates : 0;
    double previous_gap = std::numeric_limits<double>::infinity();
    for (int u = 0; u <= updates; ++u) {
      inner = minimize(obj, phi, config);
      result.iterations += inner.iterations;
      if (u == updates || obj.gap() <= config.feasibility_tol * scale) break;
      // The gap cannot drop below what the inner tolerance resolves.
      if (u > 0 && obj.gap() > 0.5 * previous_gap) break;
      previous_gap = obj.gap();
      obj.update_multiplier();
    }
    result.mu = mu;
  }
  problem.forward(phi);
  result.value = phi.cost();
  result.grad_norm = inner.grad_norm;
  result.feasibility_gap = obj.gap();
  result.endpoint = Field{u0.grid, problem.endpoint()};
  result.control = std::move(phi);
  if (!inner.converged) {
    throw NonconvergenceError("gradient norm " + std::to_string(result.grad_norm) +
                                  " above tolerance after " + std::to_string(result.iterations) +
                                  " iterations",
                              std::move(result));
  }
  return result;
}

RateResult rate_function_endpoint(const Field& u0, const ModelParams& params,
                                  const GCoefficient& g, const Field& target, double T, double dt,
                                  const OptimizerConfig& config) {
  return rate_function_event(u0, params, g, EndpointEvent::target(target), T, dt, config);
}

}  // namespace sgbh
