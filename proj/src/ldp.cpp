// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sgbh/parallel.hpp"
#include "sgbh/simd/kernels.hpp"

namespace sgbh {
namespace {

// One worker's simulation state; reused across the samples of a chunk.
class PathRunner {
 public:
  PathRunner(const ExperimentConfig& cfg, double eps)
      : cfg_(cfg),
        params_(with_eps(cfg.params, eps)),
        stepper_(cfg.u0.grid, params_, cfg.dt, cfg.g, {cfg.truncation, cfg.p}),
        steps_(step_count(cfg.T, cfg.dt)),
        u_(cfg.u0.size()),
        dw_(cfg.u0.size()) {
    if (eps > 0.0) {
      gen_.emplace(cfg.noise, cfg.u0.grid);
      scratch_.resize(std::max<std::size_t>(gen_->draws_per_step(), 1));
    }
    if (cfg.control && cfg.control->steps != static_cast<std::size_t>(steps_)) {
      throw Error(ErrorKind::InvalidArgument, "control shape does not match (T/dt) x n");
    }
  }

  long steps() const noexcept { return steps_; }

  // observer(k, u) runs after every step including k = 0; returning false stops the path.
  template <class Observer>
  void run(std::uint64_t stream, Observer&& observer) {
    std::copy(cfg_.u0.values.begin(), cfg_.u0.values.end(), u_.begin());
    if (!observer(0L, std::span<const double>(u_))) return;
    for (long k = 0; k < steps_; ++k) {
      std::span<const double> noise;
      if (gen_) {
        gen_->sample(stream, static_cast<std::uint64_t>(k), cfg_.dt, dw_, scratch_);
        noise = dw_;
      }
      std::span<const double> phi;
      if (cfg_.control) phi = cfg_.control->row(static_cast<std::size_t>(k));
      stepper_.step(u_, noise, phi, k);
      if (!observer(k + 1, std::span<const double>(u_))) return;
    }
  }

 private:
  static ModelParams with_eps(ModelParams p, double eps) {
    p.epsilon = eps;
    return p;
  }

  const ExperimentConfig& cfg_;
  ModelParams params_;
  SemiImplicitStepper stepper_;
  long steps_;
  std::optional<NoiseGenerator> gen_;
  std::vector<double> u_;
  std::vector<double> dw_;
  std::vector<double> scratch_;
};

double halton(int index, int base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

}  // namespace

double field_distance(std::span<const double> a, std::span<const double> b, double h,
                      NormKind norm, double p) {
  double acc = 0.0;
  if (norm == NormKind::Sup) {
    for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
    return acc;
  }
  const bool integral = p == std::floor(p) && p <= 64.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    acc += integral ? simd::detail::ipow(d, static_cast<int>(p)) : std::pow(d, p);
  }
  return std::pow(h * acc, 1.0 / p);
}

EventSpec EventSpec::terminal_ball(const Field& center, double eta, NormKind norm, double p,
                                   std::string description) {
  if (!(eta > 0.0)) throw Error(ErrorKind::InvalidArgument, "event radius eta must be > 0");
  if (norm == NormKind::Lp && !(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "need p >= 1");
  EventSpec e;
  e.kind = Kind::TerminalBall;
  e.center = center;
  e.eta = eta;
  e.norm = norm;
  e.p = p;
  e.description = std::move(description);
  return e;
}

EventSpec EventSpec::tube_exceed(std::vector<Field> reference, double eta, NormKind norm, double p,
                                 std::string description) {
  if (!(eta > 0.0)) throw Error(ErrorKind::InvalidArgument, "event radius eta must be > 0");
  if (reference.empty()) throw Error(ErrorKind::InvalidArgument, "empty reference trajectory");
  if (norm == NormKind::Lp && !(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "need p >= 1");
  EventSpec e;
  e.kind = Kind::TubeExceed;
  e.reference = std::move(reference);
  e.eta = eta;
  e.norm = norm;
  e.p = p;
  e.description = std::move(description);
  return e;
}

WilsonInterval wilson_interval(long hits, long n) {
  if (n <= 0) return {0.0, 1.0};
  if (hits == 0) {
    constexpr double z1 = 1.6449;
    return {0.0, z1 * z1 / (static_cast<double>(n) + z1 * z1)};
  }
  constexpr double z = 1.959964;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
  return {std::max(0.0, std::min(p, center - half)), std::min(1.0, std::max(p, center + half))};
}

std::vector<char> event_indicators(const EventSpec& event, const ExperimentConfig& config,
                                   double eps, long n_samples) {
  if (n_samples <= 0) throw Error(ErrorKind::InvalidArgument, "need a positive sample count");
  const long N = step_count(config.T, config.dt);
  if (event.kind == EventSpec::Kind::TubeExceed &&
      event.reference.size() != static_cast<std::size_t>(N) + 1) {
    throw Error(ErrorKind::InvalidArgument, "tube reference needs the state at every step");
  }
  const double h = config.u0.grid.h();
  std::vector<char> hits(static_cast<std::size_t>(n_samples), 0);
  parallel_for(
      hits.size(),
      [&](std::size_t begin, std::size_t end) {
        PathRunner runner(config, eps);
        for (std::size_t s = begin; s < end; ++s) {
          char hit = 0;
          if (event.kind == EventSpec::Kind::TerminalBall) {
            runner.run(s, [&](long k, std::span<const double> u) {
              if (k == N) {
                hit = field_distance(u, event.center.values, h, event.norm, event.p) < event.eta;
              }
              return true;
            });
          } else {
            runner.run(s, [&](long k, std::span<const double> u) {
              if (field_distance(u, event.reference[k].values, h, event.norm, event.p) > event.eta) {
                hit = 1;
                return false;
              }
              return true;
            });
          }
          hits[s] = hit;
        }
      },
      config.threads);
  return hits;
}

MCEstimate estimate_probability(const EventSpec& event, const ExperimentConfig& config, double eps,
                                long n_samples) {
  if (n_samples < 100) throw Error(ErrorKind::InvalidArgument, "need at least 100 samples");
  const auto hits = event_indicators(event, config, eps, n_samples);
  MCEstimate est;
  est.eps = eps;
  est.n_samples = n_samples;
  for (char h : hits) est.hits += h;
  est.p_hat = static_cast<double>(est.hits) / static_cast<double>(n_samples);
  est.wilson_ci = wilson_interval(est.hits, n_samples);
  if (est.hits > 0) est.eps_log_p = eps * std::log(est.p_hat);
  return est;
}

LdpCurve ldp_curve(const EventSpec& event, const ExperimentConfig& config,
                   const std::vector<double>& eps_ladder, long n_samples_per_eps,
                   double rate_reference) {
  if (eps_ladder.empty()) throw Error(ErrorKind::InvalidArgument, "empty eps ladder");
  for (std::size_t i = 1; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] < eps_ladder[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "eps ladder must be strictly decreasing");
    }
  }
  LdpCurve curve;
  curve.rate_reference = rate_reference;
  const double guard = 10.0 / static_cast<double>(n_samples_per_eps);
  for (double eps : eps_ladder) {
    MCEstimate est = estimate_probability(event, config, eps, n_samples_per_eps);
    est.rate_reference = rate_reference;
    curve.points.push_back(est);
    if (est.p_hat < guard) {
      throw UnestimableError("p_hat = " + std::to_string(est.p_hat) + " below 10/n at eps = " +
                                 std::to_string(eps),
                             curve.points);
    }
  }
  const double m = static_cast<double>(curve.points.size());
  if (curve.points.size() == 1) {
    curve.intercept = *curve.points[0].eps_log_p;
  } else {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : curve.points) {
      const double y = *pt.eps_log_p;
      sx += pt.eps;
      sy += y;
      sxx += pt.eps * pt.eps;
      sxy += pt.eps * y;
    }
    curve.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    curve.intercept = (sy - curve.slope * sx) / m;
  }
  curve.rate_estimate = -curve.intercept;
  return curve;
}

RateResult ball_rate(const EventSpec& event, const ExperimentConfig& config,
                     const OptimizerConfig& optimizer) {
  if (event.kind != EventSpec::Kind::TerminalBall || event.norm != NormKind::Lp || event.p != 2.0) {
    throw Error(ErrorKind::InvalidArgument, "rate reference needs an L2 terminal ball");
  }
  return rate_function_event(config.u0, config.params, config.g,
                             EndpointEvent::ball(event.center, event.eta), config.T, config.dt,
                             optimizer);
}

std::vector<Field> sample_initial_conditions(const Grid& grid, int count, double bound, double p) {
  std::vector<Field> out;
  for (int m = 1; static_cast<int>(out.size()) < count; ++m) {
    const std::pair<int, double> terms[] = {{1, 2.0 * halton(m, 2) - 1.0},
                                            {2, 2.0 * halton(m, 3) - 1.0},
                                            {3, 2.0 * halton(m, 5) - 1.0}};
    Field u = Field::modes(grid, terms);
    const double norm = u.lp_norm(p);
    if (!(norm > 0.0)) continue;
    const double scale = bound * (0.5 + 0.5 * halton(m, 7)) / norm;
    for (double& v : u.values) v *= scale;
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Control> sample_controls(const Grid& grid, std::size_t steps, double dt, int count,
                                     double M) {
  std::vector<Control> out;
  const double T = static_cast<double>(steps) * dt;
  for (int m = 1; static_cast<int>(out.size()) < count; ++m) {
    const std::pair<int, double> terms[] = {{1, 2.0 * halton(m, 2) - 1.0},
                                            {2, 2.0 * halton(m, 3) - 1.0}};
    const Field shape = Field::modes(grid, terms);
    const double wobble = 0.5 * halton(m, 5);
    Control c = Control::zeros(grid, steps, dt);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * dt;
      const double a = 1.0 + wobble * std::cos(2.0 * std::numbers::pi * t / T);
      auto row = c.row(k);
      for (std::size_t i = 0; i < grid.size(); ++i) row[i] = a * shape[i];
    }
    const double energy = 2.0 * c.cost();
    if (!(energy > 0.0)) continue;
    const double scale = std::sqrt(M * (0.5 + 0.5 * halton(m, 7)) / energy);
    for (double& v : c.values) v *= scale;
    out.push_back(std::move(c));
  }
  return out;
}

UniformReport uniform_convergence_experiment(const ExperimentConfig& config,
                                             const UniformConfig& uniform) {
  if (uniform.u0_set.empty() || uniform.phi_set.empty()) {
    throw Error(ErrorKind::InvalidArgument, "empty initial-condition or control set");
  }
  const std::size_t pairs = uniform.u0_set.size() * uniform.phi_set.size();
  std::vector<EventSpec> events;
  std::vector<ExperimentConfig> configs;
  for (const Field& u0 : uniform.u0_set) {
    for (const Control& phi : uniform.phi_set) {
      Trajectory skeleton = solve_skeleton(u0, config.params, config.g, phi, config.T, config.dt);
      events.push_back(EventSpec::tube_exceed(std::move(skeleton.fields), uniform.eta, NormKind::Lp,
                                              uniform.p));
      ExperimentConfig c = config;
      c.u0 = u0;
      c.control = phi;
      configs.push_back(std::move(c));
    }
  }
  UniformReport report;
  for (double eps : uniform.eps_ladder) {
    UniformPoint pt;
    pt.eps = eps;
    long worst_hits = -1;
    for (std::size_t q = 0; q < pairs; ++q) {
      const auto hits = event_indicators(events[q], configs[q], eps, uniform.n_samples);
      long count = 0;
      for (char h : hits) count += h;
      pt.frequencies.push_back(static_cast<double>(count) / static_cast<double>(uniform.n_samples));
      if (count > worst_hits) {
        worst_hits = count;
        pt.worst_u0 = q / uniform.phi_set.size();
        pt.worst_phi = q % uniform.phi_set.size();
      }
    }
    pt.worst_frequency = static_cast<double>(worst_hits) / static_cast<double>(uniform.n_samples);
    pt.ci = wilson_interval(worst_hits, uniform.n_samples);
    if (!report.points.empty()) {
      const UniformPoint& prev = report.points.back();
      if (pt.worst_frequency > prev.worst_frequency && pt.ci.lo > prev.ci.hi) report.monotone = false;
    }
    report.points.push_back(std::move(pt));
  }
  report.below_threshold =
      !report.points.empty() && report.points.back().worst_frequency <= uniform.threshold;
  return report;
}

Decomposition decompose_z_zeta(const Trajectory& trajectory, const GCoefficient& g,
                               const MildOracle* oracle) {
  if (!g.bounded()) {
    throw Error(ErrorKind::InvalidArgument, "decomposition needs a bounded noise coefficient");
  }
  if (!trajectory.noise_record) {
    throw Error(ErrorKind::NoNoiseRecord, "trajectory was integrated without retaining its noise");
  }
  const double dt = trajectory.dt;
  const long N = static_cast<long>(trajectory.noise_record->steps());
  if (trajectory.fields.size() != static_cast<std::size_t>(N) + 1) {
    throw Error(ErrorKind::InvalidArgument, "decomposition needs the state at every step");
  }
  std::optional<MildOracle> local;
  if (oracle == nullptr) {
    local.emplace(trajectory.grid, trajectory.params, static_cast<double>(N) * dt, dt, g,
                  MildOracle::Options{2, false});
    oracle = &*local;
  }
  std::vector<std::vector<double>> states;
  states.reserve(trajectory.fields.size());
  for (const Field& f : trajectory.fields) states.push_back(f.values);
  const auto zeta = oracle->stochastic_convolution(states, *trajectory.noise_record, g,
                                                   trajectory.params.epsilon);
  Decomposition out;
  out.z = trajectory;
  out.z.noise_record.reset();
  out.zeta = out.z;
  for (std::size_t k = 0; k < trajectory.fields.size(); ++k) {
    for (std::size_t i = 0; i < zeta[k].size(); ++i) {
      out.zeta.fields[k].values[i] = zeta[k][i];
      out.z.fields[k].values[i] = trajectory.fields[k].values[i] - zeta[k][i];
      out.zeta_star = std::max(out.zeta_star, std::abs(zeta[k][i]));
    }
  }
  return out;
}

std::vector<double> zeta_star_samples(const ExperimentConfig& config, long n_paths) {
  const MildOracle oracle(config.u0.grid, config.params, config.T, config.dt, config.g,
                          MildOracle::Options{2, false});
  std::vector<double> out(static_cast<std::size_t>(n_paths), 0.0);
  parallel_for(
      out.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          IntegrateOptions options;
          options.record_energy = false;
          options.retain_noise = true;
          options.truncation = config.truncation;
          options.p = config.p;
          options.stream = s;
          if (config.control) options.control = config.control->values;
          const auto run =
              integrate(config.u0, config.params, config.T, config.dt, config.noise, config.g, options);
          out[s] = decompose_z_zeta(run.trajectory, config.g, &oracle).zeta_star;
        }
      },
      config.threads);
  return out;
}

AuditEnsemble energy_audit_ensemble(const ExperimentConfig& config,
                                    const std::vector<double>& eps_ladder, long n_paths, int p,
                                    double C_audit) {
  if (n_paths < 2) throw Error(ErrorKind::InvalidArgument, "need at least two paths");
  AuditEnsemble out;
  out.C_audit = C_audit;
  for (double eps : eps_ladder) {
    ModelParams params = config.params;
    params.epsilon = eps;
    std::vector<double> ratios(static_cast<std::size_t>(n_paths), 0.0);
    parallel_for(
        ratios.size(),
        [&](std::size_t begin, std::size_t end) {
          for (std::size_t s = begin; s < end; ++s) {
            IntegrateOptions options;
            options.p = p;
            options.truncation = config.truncation;
            options.stream = s;
            if (config.control) options.control = config.control->values;
            const auto run =
                integrate(config.u0, params, config.T, config.dt, config.noise, config.g, options);
            ratios[s] = energy_audit(run.ledger, params, p, config.u0).ratio;
          }
        },
        config.threads);
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(n_paths);
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= static_cast<double>(n_paths - 1);
    AuditPoint pt;
    pt.eps = eps;
    pt.mean_ratio = mean;
    pt.std_error = std::sqrt(var / static_cast<double>(n_paths));
    pt.ci_lo = mean - 1.959964 * pt.std_error;
    pt.ci_hi = mean + 1.959964 * pt.std_error;
    if (!out.points.empty()) {
      const AuditPoint& prev = out.points.back();
      if (pt.mean_ratio > prev.mean_ratio && pt.ci_lo > prev.ci_hi) out.nonincreasing = false;
    }
    if (!(mean <= C_audit)) out.bounded = false;
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace sgbh
