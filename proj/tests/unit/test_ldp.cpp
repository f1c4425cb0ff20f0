#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sgbh/error.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/ldp.hpp"
#include "sgbh/parallel.hpp"
#include "sgbh/skeleton.hpp"

using namespace sgbh;

namespace {

Field mode(const Grid& g, int j, double a) {
  return Field::sample(g, [=](double x) { return a * eigenpair(j).phi(x); });
}

// Linear heat equation driven by a single noise mode with q_1 = 1.
ExperimentConfig surrogate(const Grid& g, double T, double dt, std::uint64_t seed) {
  ExperimentConfig c;
  c.u0 = Field::zeros(g);
  c.params.nu = 1.0;
  c.T = T;
  c.dt = dt;
  c.noise = NoiseSpec::colored_weights({1.0}, seed);
  c.g = GCoefficient::constant(1.0);
  return c;
}

// Terminal variance of the mode-1 coefficient per unit eps under the implicit scheme.
double surrogate_variance(const Grid& g, double T, double dt) {
  const double h = g.h();
  const double lam_h = 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2.0), 2);
  const double r = 1.0 / (1.0 + dt * lam_h);
  const long N = std::lround(T / dt);
  double s = 0.0;
  for (long k = 0; k < N; ++k) s += dt * std::pow(r, 2.0 * static_cast<double>(N - k));
  return s;
}

// {X > a} as a ball of huge radius R centred at (a + R) phi_1.
EventSpec half_space(const Grid& g, double a) {
  const double R = 1e4;
  return EventSpec::terminal_ball(mode(g, 1, a + R), R);
}

}  // namespace

TEST_SUITE("ldp") {

TEST_CASE("Wilson interval") {
  const double z = 1.959964;
  const long n = 400, k = 37;
  const double p = static_cast<double>(k) / n;
  const double center = (p + z * z / (2.0 * n)) / (1.0 + z * z / n);
  const double half = z / (1.0 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n));
  const WilsonInterval w = wilson_interval(k, n);
  CHECK(w.lo == doctest::Approx(center - half).epsilon(1e-12));
  CHECK(w.hi == doctest::Approx(center + half).epsilon(1e-12));
  CHECK(w.lo <= p);
  CHECK(w.hi >= p);
  const WilsonInterval zero = wilson_interval(0, 1000);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == doctest::Approx(1.6449 * 1.6449 / (1000 + 1.6449 * 1.6449)));
  const WilsonInterval all = wilson_interval(50, 50);
  CHECK(all.hi == 1.0);
}

TEST_CASE("Wilson coverage on a Bernoulli(0.05) stream") {
  std::mt19937_64 rng(20261016);
  std::bernoulli_distribution coin(0.05);
  int covered = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    long hits = 0;
    for (int i = 0; i < 1000; ++i) hits += coin(rng);
    const WilsonInterval w = wilson_interval(hits, 1000);
    covered += (w.lo <= 0.05 && 0.05 <= w.hi);
  }
  CHECK(covered >= 940);
  CHECK(covered <= 960);
}

TEST_CASE("event construction") {
  const Grid g = make_grid(15);
  CHECK_THROWS_AS(EventSpec::terminal_ball(Field::zeros(g), 0.0), Error);
  CHECK_THROWS_AS(EventSpec::tube_exceed({Field::zeros(g)}, -1.0), Error);
  const std::vector<double> a{1.0, -2.0, 0.5}, b{0.0, 0.0, 0.0};
  CHECK(field_distance(a, b, 0.5, NormKind::Sup, 2.0) == 2.0);
  CHECK(field_distance(a, b, 0.5, NormKind::Lp, 2.0) == doctest::Approx(std::sqrt(0.5 * 5.25)));
}

TEST_CASE("certain event") {
  const Grid g = make_grid(15);
  const ExperimentConfig c = surrogate(g, 0.05, 1e-3, 3);
  const MCEstimate e = estimate_probability(EventSpec::terminal_ball(Field::zeros(g), 1e9), c, 0.5, 200);
  CHECK(e.p_hat == 1.0);
  CHECK(e.hits == 200);
  REQUIRE(e.eps_log_p.has_value());
  CHECK(*e.eps_log_p == 0.0);
  CHECK_THROWS_AS(estimate_probability(EventSpec::terminal_ball(Field::zeros(g), 1.0), c, 0.5, 99), Error);
}

TEST_CASE("one-mode surrogate against the Gaussian tail") {
  const Grid g = make_grid(15);
  const double T = 0.1, dt = 1e-3, eps = 0.5;
  const ExperimentConfig c = surrogate(g, T, dt, 42);
  const double sd = std::sqrt(eps * surrogate_variance(g, T, dt));
  const double a = 1.6449 * sd;
  const double exact = 0.5 * std::erfc(a / (sd * std::sqrt(2.0)));
  CHECK(exact == doctest::Approx(0.05).epsilon(1e-3));
  const MCEstimate e = estimate_probability(half_space(g, a), c, eps, 20000);
  CHECK(e.wilson_ci.lo <= exact);
  CHECK(exact <= e.wilson_ci.hi);
}

TEST_CASE("nested events are ordered under common random numbers") {
  const Grid g = make_grid(15);
  const ExperimentConfig c = surrogate(g, 0.05, 1e-3, 8);
  const Field center = mode(g, 1, 0.1);
  for (double eps : {1.0, 0.1}) {
    const auto small = event_indicators(EventSpec::terminal_ball(center, 0.05), c, eps, 500);
    const auto large = event_indicators(EventSpec::terminal_ball(center, 0.1), c, eps, 500);
    long s = 0, l = 0;
    for (std::size_t i = 0; i < small.size(); ++i) {
      CHECK(small[i] <= large[i]);
      s += small[i];
      l += large[i];
    }
    CHECK(l >= s);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const Grid g = make_grid(15);
  ExperimentConfig c = surrogate(g, 0.05, 1e-3, 8);
  c.threads = 1;
  const auto one = event_indicators(EventSpec::terminal_ball(mode(g, 1, 0.1), 0.08), c, 0.3, 400);
  c.threads = 4;
  const auto four = event_indicators(EventSpec::terminal_ball(mode(g, 1, 0.1), 0.08), c, 0.3, 400);
  CHECK(one == four);

  std::vector<int> seen(1000, 0);
  parallel_for(seen.size(), [&](std::size_t b, std::size_t e) { for (std::size_t i = b; i < e; ++i) ++seen[i]; }, 3);
  for (int v : seen) CHECK(v == 1);
}

TEST_CASE("ball at the deterministic endpoint has rate zero") {
  const Grid g = make_grid(15);
  const ExperimentConfig c = surrogate(g, 0.05, 1e-3, 13);
  const EventSpec ball = EventSpec::terminal_ball(Field::zeros(g), 0.05);
  double previous = -1e300;
  for (double eps : {0.5, 0.1, 0.02}) {
    const MCEstimate e = estimate_probability(ball, c, eps, 2000);
    REQUIRE(e.eps_log_p.has_value());
    CHECK(*e.eps_log_p >= previous);
    previous = *e.eps_log_p;
  }
  CHECK(previous > -0.01);
  const RateResult r = ball_rate(ball, c);
  CHECK(r.value == 0.0);
}

TEST_CASE("ldp curve fit and estimability guard") {
  const Grid g = make_grid(15);
  const ExperimentConfig c = surrogate(g, 0.05, 1e-3, 21);
  CHECK_THROWS_AS(ldp_curve(EventSpec::terminal_ball(Field::zeros(g), 1.0), c, {0.1, 0.2}, 100), Error);

  const LdpCurve curve = ldp_curve(EventSpec::terminal_ball(Field::zeros(g), 1e9), c, {0.4, 0.2, 0.1}, 100, 0.0);
  CHECK(curve.points.size() == 3);
  CHECK(curve.rate_estimate == doctest::Approx(0.0));
  CHECK(curve.points[1].rate_reference == 0.0);

  const double sd = std::sqrt(surrogate_variance(g, 0.05, 1e-3));
  try {
    ldp_curve(half_space(g, 6.0 * sd), c, {1.0, 0.5, 0.05}, 200);
    FAIL("expected unestimable");
  } catch (const UnestimableError& e) {
    CHECK(e.kind() == ErrorKind::Unestimable);
    CHECK_FALSE(e.partial().empty());
    CHECK(e.partial().back().p_hat < 10.0 / 200.0);
  }
}

TEST_CASE("bounded sets") {
  const Grid g = make_grid(31);
  const auto u0s = sample_initial_conditions(g, 5, 1.0, 4.0);
  REQUIRE(u0s.size() == 5);
  for (const Field& u : u0s) {
    CHECK(u.lp_norm(4.0) <= 1.0 + 1e-12);
    CHECK(u.lp_norm(4.0) >= 0.5 - 1e-12);
  }
  CHECK(sample_initial_conditions(g, 5, 1.0, 4.0)[3].values == u0s[3].values);
  const auto phis = sample_controls(g, 100, 1e-3, 3, 1.0);
  REQUIRE(phis.size() == 3);
  for (const Control& c : phis) {
    CHECK(c.within(1.0 + 1e-12));
    CHECK(2.0 * c.cost() >= 0.5 - 1e-12);
  }
}

TEST_CASE("uniform convergence report") {
  const Grid g = make_grid(15);
  ExperimentConfig c = surrogate(g, 0.05, 1e-3, 4);
  UniformConfig u;
  u.u0_set = sample_initial_conditions(g, 2, 0.5, 4.0);
  u.phi_set = {Control::zeros(g, 50, 1e-3)};
  u.eps_ladder = {1.0, 0.1};
  u.n_samples = 100;
  u.eta = 1e9;
  const UniformReport none = uniform_convergence_experiment(c, u);
  for (const auto& pt : none.points) {
    CHECK(pt.worst_frequency == 0.0);
    for (double f : pt.frequencies) CHECK(f == 0.0);
  }
  CHECK(none.monotone);
  CHECK(none.below_threshold);

  // phi = 0, linear model: the sup over time dominates the terminal Gaussian tail.
  u.u0_set = {Field::zeros(g)};
  u.eps_ladder = {0.5};
  u.n_samples = 2000;
  u.p = 2.0;
  const double sd = std::sqrt(0.5 * surrogate_variance(g, 0.05, 1e-3));
  u.eta = 1.5 * sd;
  const UniformReport r = uniform_convergence_experiment(c, u);
  const double terminal = std::erfc(1.5 / std::sqrt(2.0));
  CHECK(r.points[0].ci.hi >= terminal);
  CHECK(r.points[0].worst_frequency <= 1.0);
}

TEST_CASE("z and zeta decomposition") {
  const Grid g = make_grid(15);
  ModelParams p;
  p.nu = 1.0;
  IntegrateOptions opt;
  opt.retain_noise = true;
  const Field u0 = mode(g, 1, 0.4);
  const auto det = integrate(u0, p, 0.05, 1e-3, NoiseSpec::white(1), GCoefficient::constant(1.0), opt);
  const Decomposition d0 = decompose_z_zeta(det.trajectory, GCoefficient::constant(1.0));
  CHECK(d0.zeta_star == 0.0);
  for (std::size_t k = 0; k < d0.z.fields.size(); ++k) CHECK(d0.z.fields[k].values == det.trajectory.fields[k].values);

  // z_a - z_b is the scheme's strong error on the noise difference, linear in sqrt(eps).
  auto z_gap = [&](double eps, const NoiseSpec& s1, const NoiseSpec& s2) {
    ModelParams q = p;
    q.epsilon = eps;
    const auto a = integrate(u0, q, 0.05, 1e-3, s1, GCoefficient::constant(1.0), opt);
    const auto b = integrate(u0, q, 0.05, 1e-3, s2, GCoefficient::constant(1.0), opt);
    const Decomposition da = decompose_z_zeta(a.trajectory, GCoefficient::constant(1.0));
    const Decomposition db = decompose_z_zeta(b.trajectory, GCoefficient::constant(1.0));
    CHECK(da.zeta_star > 0.0);
    double gap = 0.0;
    for (std::size_t k = 0; k < da.z.fields.size(); ++k) {
      for (std::size_t i = 0; i < g.size(); ++i) gap = std::max(gap, std::abs(da.z.fields[k][i] - db.z.fields[k][i]));
    }
    return gap;
  };
  const double white_hi = z_gap(1e-2, NoiseSpec::white(1), NoiseSpec::white(2));
  const double white_lo = z_gap(1e-4, NoiseSpec::white(1), NoiseSpec::white(2));
  CHECK(white_hi / white_lo == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(white_lo <= 5e-3);
  CHECK(z_gap(1e-2, NoiseSpec::colored(0.5, 4, 1), NoiseSpec::colored(0.5, 4, 2)) <= 5e-3);

  p.epsilon = 0.01;
  const auto a = integrate(u0, p, 0.05, 1e-3, NoiseSpec::white(1), GCoefficient::constant(1.0), opt);
  CHECK_THROWS_AS(decompose_z_zeta(a.trajectory, GCoefficient::linear(1.0)), Error);
  const auto bare = integrate(u0, p, 0.05, 1e-3, NoiseSpec::white(1), GCoefficient::constant(1.0));
  try {
    decompose_z_zeta(bare.trajectory, GCoefficient::constant(1.0));
    FAIL("expected no-noise-record");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoNoiseRecord);
  }
}

TEST_CASE("zeta star moments and audit ensemble") {
  const Grid g = make_grid(15);
  ExperimentConfig c;
  c.u0 = mode(g, 1, 0.3);
  c.params.nu = 1.0;
  c.params.epsilon = 0.05;
  c.T = 0.05;
  c.dt = 1e-3;
  c.noise = NoiseSpec::white(6);
  c.g = GCoefficient::constant(1.0);
  const auto z1 = zeta_star_samples(c, 40);
  const auto z2 = zeta_star_samples(c, 40);
  CHECK(z1 == z2);
  for (double v : z1) CHECK(std::isfinite(v));

  ExperimentConfig a = c;
  a.params.alpha = 1.0;
  a.params.beta = 1.0;
  a.params.nu = 0.1;
  const AuditEnsemble e = energy_audit_ensemble(a, {1.0, 0.1}, 50, 4, 100.0);
  REQUIRE(e.points.size() == 2);
  CHECK(e.bounded);
  for (const auto& pt : e.points) {
    CHECK(pt.ci_lo <= pt.mean_ratio);
    CHECK(pt.mean_ratio <= pt.ci_hi);
  }
}

}
