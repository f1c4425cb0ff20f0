#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sgbh/error.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/kernel.hpp"
#include "sgbh/kernel_quadrature.hpp"
#include "sgbh/quadrature.hpp"

using namespace sgbh;

namespace {

// Direct image sum in long double, independent of the library.
long double image_oracle(long double t, long double x, long double y) {
  const long double pi = std::numbers::pi_v<long double>;
  long double s = 0.0L;
  for (int m = -40; m <= 40; ++m) {
    const long double a = y - x - 2.0L * m;
    const long double b = y + x - 2.0L * m;
    s += std::exp(-a * a / (4.0L * t)) - std::exp(-b * b / (4.0L * t));
  }
  return s / std::sqrt(4.0L * pi * t);
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("image series matches a direct long double sum") {
  const double v = g_image(0.01, 0.5, 0.5, 1.0, 5);
  CHECK(v == doctest::Approx(static_cast<double>(image_oracle(0.01L, 0.5L, 0.5L))).epsilon(1e-13));
  CHECK(v == doctest::Approx(2.8209479).epsilon(1e-7));
  // effective time nu t
  CHECK(g_image(0.02, 0.3, 0.6, 0.5) ==
        doctest::Approx(static_cast<double>(image_oracle(0.01L, 0.3L, 0.6L))).epsilon(1e-12));
}

TEST_CASE("symmetry and boundary values") {
  for (double t : {1e-3, 0.01, 0.2, 1.0}) {
    for (double x : {0.1, 0.37, 0.8}) {
      for (double y : {0.05, 0.5, 0.93}) {
        CHECK(g_image(t, x, y, 1.0) == g_image(t, y, x, 1.0));
        CHECK(g_image(t, x, y, 1.0) >= -1e-12);
      }
    }
  }
  CHECK(std::abs(g_image(0.01, 0.5, 0.0, 1.0)) < 1e-13);
  CHECK(std::abs(g_image(0.01, 0.5, 1.0, 1.0)) < 1e-13);
  CHECK(g_spectral(0.1, 0.0, 0.4, 1.0, 50) == 0.0);
}

TEST_CASE("spectral and image representations agree") {
  CHECK(std::abs(g_spectral(0.05, 0.3, 0.7, 1.0, 200) - g_image(0.05, 0.3, 0.7, 1.0, 5)) < 1e-10);
  const double one_mode = 2.0 * std::exp(-std::numbers::pi * std::numbers::pi);
  CHECK(g_spectral(1.0, 0.5, 0.5, 1.0, 3) == doctest::Approx(one_mode).epsilon(1e-12));
  CHECK(one_mode == doctest::Approx(1.040e-4).epsilon(1e-3));
}

TEST_CASE("singular time is rejected") {
  for (double t : {0.0, -1.0}) {
    CHECK_THROWS_AS(g_image(t, 0.5, 0.5, 1.0), Error);
    CHECK_THROWS_AS(g_spectral(t, 0.5, 0.5, 1.0), Error);
    CHECK_THROWS_AS(dg_dy(t, 0.5, 0.5, 1.0), Error);
  }
  try {
    g_image(0.0, 0.5, 0.5, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularTime);
  }
}

TEST_CASE("y derivative") {
  CHECK(std::abs(dg_dy(0.01, 0.5, 0.5, 1.0)) < 1e-13);
  const double d = 1e-6;
  for (double y : {0.2, 0.45, 0.62, 0.9}) {
    const double fd = (g_image(0.01, 0.5, y + d, 1.0) - g_image(0.01, 0.5, y - d, 1.0)) / (2 * d);
    CHECK(dg_dy(0.01, 0.5, y, 1.0) == doctest::Approx(fd).epsilon(1e-6));
  }
  // The kernel is odd in y across the boundary, so the reflected value is -G(t,x,d).
  const double fd0 = (g_image(0.01, 0.5, d, 1.0) + g_image(0.01, 0.5, d, 1.0)) / (2 * d);
  CHECK(dg_dy(0.01, 0.5, 0.0, 1.0) == doctest::Approx(fd0).epsilon(1e-6));
}

TEST_CASE("mass, monotonicity and Chapman-Kolmogorov") {
  for (double x : {0.1, 0.5, 0.77}) {
    double previous = 1.0;
    for (double t : {1e-3, 1e-2, 0.05, 0.1, 0.3, 1.0}) {
      const double m = kernel_mass(t, x, 1.0);
      CHECK(m > 0.0);
      CHECK(m <= 1.0 + 1e-12);
      CHECK(m <= previous + 1e-12);
      previous = m;
    }
  }
  CHECK(std::abs(chapman_kolmogorov(0.25, 0.5, 0.5, 1.0) - g_image(0.25, 0.5, 0.5, 1.0)) < 1e-8);
  CHECK(std::abs(chapman_kolmogorov(0.02, 0.3, 0.4, 1.0) - g_image(0.02, 0.3, 0.4, 1.0)) < 1e-8);
}

TEST_CASE("consistency sweep on a coarse lattice") {
  const KernelConsistency c = check_kernel_consistency(1.0, 12);
  CHECK(c.max_representation_gap <= 1e-9);
  CHECK(c.max_chapman_kolmogorov_gap <= 1e-8);
  CHECK(c.mass_in_unit_interval);
  CHECK(c.mass_monotone_in_t);
}

TEST_CASE("appendix bound spot checks") {
  std::vector<double> ts;
  for (int k = 0; k < 13; ++k) ts.push_back(1e-3 * std::pow(250.0, k / 12.0));
  std::vector<double> xy;
  for (int k = 1; k <= 9; ++k) xy.push_back(0.1 * k);
  const auto reports = verify_kernel_bounds(ts, xy, 1.0);
  REQUIRE(reports.size() == 7);
  // 1 + 2 sum_{m >= 1} exp(-m^2 / t_max) bounds the image contributions.
  double images = 1.0;
  for (int m = 1; m < 20; ++m) images += 2.0 * std::exp(-m * m / 0.25);
  for (const auto& r : reports) {
    INFO(r.bound_id);
    CHECK(r.pass);
    CHECK(r.a_constant == 8.0);
    CHECK(r.n_samples > 0);
  }
  CHECK(reports[0].bound_id == "A1");
  CHECK(reports[0].empirical_C <= 0.2821 * images + 1e-4);
  CHECK(reports[0].empirical_C >= 0.28);
  CHECK_THROWS_AS(verify_kernel_bounds(std::vector<double>{0.0}, xy, 1.0), Error);
}

TEST_CASE("hat weights integrate the kernel against hats") {
  const Grid g = make_grid(15);
  const KernelQuadrature kq(g, 1.0);
  const double t = 0.01;
  const auto w = kq.hat_weights(t);
  const std::size_t n = g.size();
  const double h = g.h();
  for (std::size_t i : {0u, 7u, 14u}) {
    for (std::size_t k : {0u, 6u, 7u, 14u}) {
      const double xk = g.node(k);
      auto hat = [&](double y) { return std::max(0.0, 1.0 - std::abs(y - xk) / h); };
      const double ref = quad::composite_gl8(
          [&](double y) { return g_image(t, g.node(i), y, 1.0) * hat(y); }, xk - h, xk + h, 64);
      CHECK(w[i * n + k] == doctest::Approx(ref).epsilon(1e-10));
    }
  }
  // Applying the weights to phi_1 approximates the heat semigroup.
  const Field phi1 = Field::sample(g, [](double x) { return eigenpair(1).phi(x); });
  const double decay = std::exp(-eigenpair(1).lambda * t);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[i * n + k] * phi1[k];
    CHECK(std::abs(s - decay * phi1[i]) < 5e-3);
  }
  CHECK(kq.cell_integral(t, 0.5, 0.0, 1.0) == doctest::Approx(kernel_mass(t, 0.5, 1.0)).epsilon(1e-10));
}

}
