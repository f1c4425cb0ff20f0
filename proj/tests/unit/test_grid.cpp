#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sgbh/error.hpp"
#include "sgbh/grid.hpp"
#include "sgbh/quadrature.hpp"

using namespace sgbh;

TEST_SUITE("grid") {

TEST_CASE("mesh width and nodes") {
  const Grid g = make_grid(3);
  CHECK(g.h() == 0.25);
  CHECK(g.node(0) == 0.25);
  CHECK(g.node(1) == 0.5);
  CHECK(g.node(2) == 0.75);

  const Grid g99 = make_grid(99);
  CHECK(g99.h() == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(g99.node(49) == doctest::Approx(0.5).epsilon(1e-15));
  const auto nodes = g99.nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    CHECK(nodes[i] > nodes[i - 1]);
    CHECK(std::abs((nodes[i] - nodes[i - 1]) - g99.h()) < 4e-16);
  }
  CHECK(nodes.front() > 0.0);
  CHECK(nodes.back() < 1.0);
}

TEST_CASE("degenerate grids are rejected") {
  for (std::size_t n : {0u, 1u, 2u}) {
    try {
      make_grid(n);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Degenerate);
    }
  }
}

TEST_CASE("eigenpairs") {
  const double pi = std::numbers::pi;
  CHECK(eigenpair(1).lambda == doctest::Approx(pi * pi).epsilon(1e-15));
  CHECK(eigenpair(1).lambda == doctest::Approx(9.8696044).epsilon(1e-8));
  CHECK(eigenpair(1).phi(0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(eigenpair(2).phi(0.5)) < 1e-15);
  for (int j = 1; j < 20; ++j) CHECK(eigenpair(j + 1).lambda > eigenpair(j).lambda);
}

TEST_CASE("projection onto eigenmodes") {
  const Grid g = make_grid(99);
  const Field phi1 = Field::sample(g, [](double x) { return eigenpair(1).phi(x); });
  const double h2 = g.h() * g.h();
  CHECK(std::abs(project(phi1, 1) - 1.0) < 10.0 * h2);
  CHECK(std::abs(project(phi1, 2)) < 10.0 * h2);

  // int_0^1 x (1 - x) sqrt(2) sin(pi x) dx = 4 sqrt(2) / pi^3, cross-checked by quadrature.
  const Field parabola = Field::sample(g, [](double x) { return x * (1.0 - x); });
  const double closed = 4.0 * std::sqrt(2.0) / std::pow(std::numbers::pi, 3);
  const double quadrature = quad::composite_gl8(
      [](double x) { return x * (1.0 - x) * eigenpair(1).phi(x); }, 0.0, 1.0, 16);
  CHECK(closed == doctest::Approx(quadrature).epsilon(1e-14));
  CHECK(std::abs(project(parabola, 1) - closed) < 1e-3);

  try {
    project(parabola, 100);
    FAIL("expected aliasing error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Aliasing);
  }
}

TEST_CASE("discrete Gram matrix is the identity") {
  for (std::size_t n : {15u, 63u, 127u}) {
    const Grid g = make_grid(n);
    const int J = static_cast<int>(n / 4);
    for (int j = 1; j <= J; ++j) {
      const Field pj = Field::sample(g, [j](double x) { return eigenpair(j).phi(x); });
      for (int k = 1; k <= J; ++k) {
        const Field pk = Field::sample(g, [k](double x) { return eigenpair(k).phi(x); });
        const double expected = j == k ? 1.0 : 0.0;
        CHECK(std::abs(inner(pj, pk) - expected) <= 10.0 / static_cast<double>(n * n));
      }
    }
  }
}

TEST_CASE("second difference reproduces eigenvalues") {
  const Grid g = make_grid(63);
  for (int j = 1; j <= 10; ++j) {
    const double jph = j * std::numbers::pi * g.h();
    if (jph >= 0.5) break;
    const Field pj = Field::sample(g, [j](double x) { return eigenpair(j).phi(x); });
    const Field d2 = second_difference(pj);
    const double lambda = eigenpair(j).lambda;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::abs(pj[i]) < 1e-3) continue;
      const double rel = std::abs(d2[i] + lambda * pj[i]) / std::abs(lambda * pj[i]);
      CHECK(rel <= jph * jph / 12.0 * 1.5);
    }
  }
}

TEST_CASE("discrete norms") {
  const Grid g = make_grid(9);
  Field u = Field::zeros(g);
  u[3] = -2.0;
  CHECK(u.sup_norm() == 2.0);
  CHECK(u.lp_power(2.0) == doctest::Approx(4.0 * g.h()));
  CHECK(u.lp_norm(4.0) == doctest::Approx(std::pow(16.0 * g.h(), 0.25)));
  CHECK(u.all_finite());
  u[0] = std::nan("");
  CHECK_FALSE(u.all_finite());
}

}
