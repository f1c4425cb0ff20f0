#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sgbh/error.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/mild_oracle.hpp"
#include "sgbh/noise.hpp"
#include "sgbh/solver.hpp"

using namespace sgbh;

namespace {

Field mode(const Grid& g, int j, double a) {
  return Field::sample(g, [=](double x) { return a * eigenpair(j).phi(x); });
}

ModelParams benchmark(double eps = 0.0) {
  ModelParams p;
  p.nu = 0.1;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.gamma = 1.0;
  p.delta = 1;
  p.epsilon = eps;
  return p;
}

double sup_distance(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_SUITE("mild_oracle") {

TEST_CASE("heat evolution in one iteration") {
  const Grid g = make_grid(31);
  ModelParams p;
  p.nu = 0.5;
  PicardReport rep;
  const Trajectory t = picard_mild_oracle(mode(g, 1, 1.0), p, 0.1, 0.01, nullptr,
                                          GCoefficient::constant(1.0), 5, 1e-12, &rep);
  CHECK(rep.iterations == 1);
  const double decay = std::exp(-p.nu * eigenpair(1).lambda * 0.1);
  CHECK(sup_distance(t.final(), mode(g, 1, decay)) < 2e-3);
  CHECK(t.fields.size() == 11);
}

TEST_CASE("Picard residuals contract geometrically near zero") {
  const Grid g = make_grid(31);
  PicardReport rep;
  picard_mild_oracle(mode(g, 1, 0.2), benchmark(), 0.05, 1e-3, nullptr,
                     GCoefficient::constant(1.0), 50, 1e-13, &rep);
  REQUIRE(rep.residuals.size() >= 4);
  for (std::size_t k = 2; k < rep.residuals.size(); ++k) {
    if (rep.residuals[k - 1] < 1e-14) break;
    CHECK(rep.residuals[k] / rep.residuals[k - 1] < 0.9);
  }
}

TEST_CASE("iteration budget is enforced") {
  const Grid g = make_grid(15);
  try {
    picard_mild_oracle(mode(g, 1, 0.5), benchmark(), 0.1, 1e-2, nullptr,
                       GCoefficient::constant(1.0), 2, 1e-14);
    FAIL("expected no-contraction error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoContraction);
  }
}

TEST_CASE("stepper agrees with the mild solution") {
  const Grid g = make_grid(31);
  const Field u0 = mode(g, 1, 0.5);
  const Trajectory oracle = picard_mild_oracle(u0, benchmark(), 0.1, 1e-3, nullptr,
                                               GCoefficient::constant(1.0), 100, 1e-12);
  const auto stepper = integrate(u0, benchmark(), 0.1, 1e-4, NoiseSpec::white(0), GCoefficient::constant(1.0));
  double worst = 0.0;
  for (std::size_t k = 0; k < oracle.fields.size(); ++k) {
    worst = std::max(worst, sup_distance(oracle.fields[k], stepper.trajectory.fields[10 * k]));
  }
  CHECK(worst <= 5e-3);
}

TEST_CASE("first order in time against the oracle") {
  // Fine mesh so the O(h^2) spatial mismatch stays well below the dt error.
  const Grid g = make_grid(127);
  const Field u0 = mode(g, 1, 0.5);
  const Trajectory ref = picard_mild_oracle(u0, benchmark(), 0.1, 2e-3, nullptr,
                                            GCoefficient::constant(1.0), 100, 1e-13);
  std::vector<double> errors;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const auto r = integrate(u0, benchmark(), 0.1, dt, NoiseSpec::white(0), GCoefficient::constant(1.0));
    errors.push_back(sup_distance(r.trajectory.final(), ref.final()));
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    INFO("errors " << errors[k - 1] << " -> " << errors[k]);
    CHECK(std::log2(errors[k - 1] / errors[k]) >= 0.9);
  }
}

TEST_CASE("stochastic convolution") {
  const Grid g = make_grid(15);
  ModelParams p;
  p.nu = 1.0;
  p.epsilon = 0.25;
  IntegrateOptions opt;
  opt.retain_noise = true;
  const auto run = integrate(mode(g, 1, 0.3), p, 0.05, 1e-3, NoiseSpec::white(8), GCoefficient::constant(2.0), opt);
  const NoisePath& noise = *run.trajectory.noise_record;
  const MildOracle oracle(g, p, 0.05, 1e-3, GCoefficient::constant(2.0));
  std::vector<std::vector<double>> states;
  for (const Field& f : run.trajectory.fields) states.push_back(f.values);

  const auto zeta = oracle.stochastic_convolution(states, noise, GCoefficient::constant(2.0), p.epsilon);
  // Linear in sqrt(eps) g and zero at t = 0.
  const auto half = oracle.stochastic_convolution(states, noise, GCoefficient::constant(1.0), p.epsilon);
  for (double v : zeta[0]) CHECK(v == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(zeta[30][i] == doctest::Approx(2.0 * half[30][i]).epsilon(1e-12));
  const auto none = oracle.stochastic_convolution(states, noise, GCoefficient::constant(2.0), 0.0);
  for (const auto& row : none) for (double v : row) CHECK(v == 0.0);

  // Linear dynamics: the mild solution is the heat term plus the convolution.
  const Trajectory mild = oracle.solve(mode(g, 1, 0.3), &noise, 5, 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double heat = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) heat += oracle.heat(49)[i * g.size() + k] * mode(g, 1, 0.3)[k];
    CHECK(mild.final()[i] == doctest::Approx(heat + zeta[50][i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(oracle.solve(mode(g, 1, 0.3), nullptr, 5, 1e-12), Error);
}

}
