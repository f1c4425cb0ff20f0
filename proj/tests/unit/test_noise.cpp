#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sgbh/error.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/noise.hpp"

using namespace sgbh;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace

TEST_SUITE("noise") {

TEST_CASE("Philox4x32-10 known answers") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
        B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             {0xffffffffu, 0xffffffffu}) ==
        B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u}) ==
        B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("trace condition is strict") {
  CHECK_NOTHROW(NoiseSpec::colored(0.26, 8, 1));
  try {
    NoiseSpec::colored(0.25, 8, 1);
    FAIL("expected trace-condition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TraceCondition);
  }
  CHECK_THROWS_AS(NoiseSpec::colored(0.2, 8, 1), Error);
  // Partial traces stay below the full series sum_j (j pi)^{-4 eta}.
  const NoiseSpec s = NoiseSpec::colored(0.5, 64, 1);
  double full = 0.0;
  for (int j = 1; j < 200000; ++j) full += std::pow(j * std::numbers::pi, -2.0);
  CHECK(s.trace(64) < full);
  CHECK(full == doctest::Approx(1.0 / 6.0).epsilon(1e-4));
}

TEST_CASE("single mode variance") {
  const Grid g = make_grid(31);
  const double dt = 1e-3;
  const std::size_t mid = 15;  // x = 0.5
  const double pi = std::numbers::pi;
  // q_1 = lambda_1^{-eta}; Var = q_1^2 phi_1(0.5)^2 dt
  struct Case {
    double eta;
    double expected;
  };
  for (const Case c : {Case{0.5, 2.0 / (pi * pi)}, Case{1.0, 2.0 / std::pow(pi, 4)}}) {
    const NoiseGenerator gen(NoiseSpec::colored(c.eta, 1, 7), g);
    const long N = 100000;
    double s2 = 0.0;
    for (long k = 0; k < N; ++k) {
      const double v = gen.sample(static_cast<std::uint64_t>(k), dt).values[mid];
      s2 += v * v;
    }
    const double var = s2 / N;
    CHECK(var == doctest::Approx(c.expected * dt).epsilon(5.0 * std::sqrt(2.0 / N)));
    CHECK(gen.covariance_per_unit_time()[mid * 31 + mid] == doctest::Approx(c.expected).epsilon(1e-12));
  }
  CHECK(2.0 / std::pow(pi, 4) == doctest::Approx(0.020532).epsilon(1e-4));
}

TEST_CASE("colored increments are zero mean with the formula covariance") {
  const Grid g = make_grid(31);
  const std::size_t n = g.size();
  const double dt = 1e-2;
  const NoiseSpec spec = NoiseSpec::colored(0.5, 32, 11);
  const NoiseGenerator gen(spec, g);
  // Oracle covariance assembled directly from q_j and phi_j.
  std::vector<double> exact(n * n, 0.0);
  for (int j = 1; j <= 32; ++j) {
    const double qj = std::pow(eigenpair(j).lambda, -0.5);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        exact[a * n + b] += dt * qj * qj * eigenpair(j).phi(g.node(a)) * eigenpair(j).phi(g.node(b));
      }
    }
  }
  const long N = 100000;
  std::vector<double> mean(n, 0.0), cov(n * n, 0.0), inc(n), scratch(32);
  for (long k = 0; k < N; ++k) {
    gen.sample(3, static_cast<std::uint64_t>(k), dt, inc, scratch);
    for (std::size_t a = 0; a < n; ++a) {
      mean[a] += inc[a];
      for (std::size_t b = 0; b < n; ++b) cov[a * n + b] += inc[a] * inc[b];
    }
  }
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) {
    cov[i] /= N;
    err += (cov[i] - exact[i]) * (cov[i] - exact[i]);
    norm += exact[i] * exact[i];
  }
  CHECK(std::sqrt(err / norm) <= 5.0 * std::sqrt(2.0 / N));
  for (std::size_t a = 0; a < n; ++a) {
    const double sigma = std::sqrt(exact[a * n + a] / N);
    CHECK(std::abs(mean[a] / N) <= 4.0 * sigma);
  }
}

TEST_CASE("white increments") {
  const Grid g = make_grid(31);
  const std::size_t n = g.size();
  const double dt = 1e-3;
  const NoiseGenerator gen(NoiseSpec::white(5), g);
  const long N = 40000;
  std::vector<double> s2(n, 0.0), inc(n), scratch(n);
  double cross = 0.0, total2 = 0.0;
  for (long k = 0; k < N; ++k) {
    gen.sample(0, static_cast<std::uint64_t>(k), dt, inc, scratch);
    double integral = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s2[i] += inc[i] * inc[i];
      integral += inc[i] * g.h();
    }
    cross += inc[3] * inc[17];
    total2 += integral * integral;
  }
  const double var = dt / g.h();
  for (std::size_t i = 0; i < n; ++i) CHECK(s2[i] / N == doctest::Approx(var).epsilon(5.0 * std::sqrt(2.0 / N)));
  CHECK(std::abs(cross / N) <= 5.0 * var / std::sqrt(N));
  CHECK(total2 / N == doctest::Approx(dt * (1.0 - g.h())).epsilon(5.0 * std::sqrt(2.0 / N)));
  CHECK(dt * g.h() * n == doctest::Approx(dt * (1.0 - g.h())));
}

TEST_CASE("marginal normality by Kolmogorov-Smirnov") {
  const Grid g = make_grid(31);
  const double dt = 1e-2;
  for (NoiseSpec spec : {NoiseSpec::white(2), NoiseSpec::colored(0.75, 16, 2)}) {
    const NoiseGenerator gen(spec, g);
    const auto cov = gen.covariance_per_unit_time();
    for (std::size_t node : {2u, 13u, 27u}) {
      const double sd = std::sqrt(cov[node * 31 + node] * dt);
      std::vector<double> xs;
      for (long k = 0; k < 10000; ++k) {
        xs.push_back(gen.sample(static_cast<std::uint64_t>(k), dt).values[node] / sd);
      }
      // alpha = 0.01 critical value 1.628 / sqrt(n)
      CHECK(ks_statistic(xs) < 1.628 / std::sqrt(10000.0));
    }
  }
}

TEST_CASE("streams are uncorrelated") {
  const Grid g = make_grid(15);
  const NoiseGenerator gen(NoiseSpec::white(99), g);
  std::vector<double> a(15), b(15), scratch(15);
  const long N = 20000;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (long k = 0; k < N; ++k) {
    gen.sample(0, static_cast<std::uint64_t>(k), 1.0, a, scratch);
    gen.sample(1, static_cast<std::uint64_t>(k), 1.0, b, scratch);
    sab += a[7] * b[7];
    saa += a[7] * a[7];
    sbb += b[7] * b[7];
  }
  CHECK(std::abs(sab / std::sqrt(saa * sbb)) <= 4.0 / std::sqrt(N));
}

TEST_CASE("determinism") {
  const Grid g = make_grid(31);
  const NoiseSpec spec = NoiseSpec::colored(0.6, 20, 1234, 9);
  const auto x = sample_colored_increment(spec, g, 1e-3, 17).values.values;
  const auto y = sample_colored_increment(spec, g, 1e-3, 17).values.values;
  CHECK(x == y);
  const auto z = sample_colored_increment(spec, g, 1e-3, 18).values.values;
  CHECK(x != z);
  CHECK_THROWS_AS(sample_colored_increment(NoiseSpec::white(1), g, 1e-3), Error);
  CHECK_THROWS_AS(sample_white_increment(spec, g, 1e-3), Error);
  CHECK_THROWS_AS(sample_white_increment(NoiseSpec::white(1), g, 0.0), Error);
}

TEST_CASE("Brownian sheet checkpoints") {
  const Grid g = make_grid(15);
  const double dt = 0.01;
  NoiseSpec spec = NoiseSpec::colored(0.5, 8, 31);
  const Field w0 = brownian_sheet_checkpoint(spec, g, 0.0, dt);
  for (double v : w0.values) CHECK(v == 0.0);
  try {
    brownian_sheet_checkpoint(spec, g, 0.015, dt);
    FAIL("expected alignment error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Alignment);
  }
  CHECK(brownian_sheet_checkpoint(spec, g, 0.05, dt).values ==
        brownian_sheet_checkpoint(spec, g, 0.05, dt).values);

  double slope = 0.0;
  for (int j = 1; j <= 8; ++j) {
    const double qj = std::pow(eigenpair(j).lambda, -0.5);
    slope += qj * qj * std::pow(eigenpair(j).phi(0.5), 2);
  }
  const std::size_t mid = 7;
  const long M = 20000;
  for (double t : {0.02, 0.08}) {
    double s2 = 0.0;
    for (long m = 0; m < M; ++m) {
      spec.stream_id = static_cast<std::uint64_t>(m);
      const double w = brownian_sheet_checkpoint(spec, g, t, dt).values[mid];
      s2 += w * w;
    }
    CHECK(s2 / M == doctest::Approx(slope * t).epsilon(5.0 * std::sqrt(2.0 / M)));
  }
}

}
