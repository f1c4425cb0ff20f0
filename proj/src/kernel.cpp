// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sgbh/error.hpp"
#include "sgbh/quadrature.hpp"

namespace sgbh {
namespace {

constexpr double kPi = std::numbers::pi;

double effective_time(double t, double nu) {
  if (!(t > 0.0)) throw Error(ErrorKind::SingularTime, "kernel evaluated at t <= 0");
  if (!(nu > 0.0)) throw Error(ErrorKind::InvalidArgument, "diffusivity must be positive");
  return nu * t;
}

}  // namespace

double g_image(double t, double x, double y, double nu, int M) {
  const double tau = effective_time(t, nu);
  const double d = std::abs(x - y);
  const double s = x + y;
  const double inv4tau = 1.0 / (4.0 * tau);
  double sum = 0.0;
  for (int m = -M; m <= M; ++m) {
    const double a = d - 2.0 * m;
    const double b = s - 2.0 * m;
    sum += std::exp(-a * a * inv4tau) - std::exp(-b * b * inv4tau);
  }
  return sum / std::sqrt(4.0 * kPi * tau);
}

double dg_dy(double t, double x, double y, double nu, int M) {
  const double tau = effective_time(t, nu);
  const double inv4tau = 1.0 / (4.0 * tau);
  double sum = 0.0;
  for (int m = -M; m <= M; ++m) {
    const double a = y - x - 2.0 * m;
    const double b = y + x - 2.0 * m;
    sum += -a * std::exp(-a * a * inv4tau) + b * std::exp(-b * b * inv4tau);
  }
  return sum / (2.0 * tau * std::sqrt(4.0 * kPi * tau));
}

double dg_dt(double t, double x, double y, double nu, int M) {
  const double tau = effective_time(t, nu);
  const double inv4tau = 1.0 / (4.0 * tau);
  const double half_inv_tau = 0.5 / tau;
  double sum = 0.0;
  for (int m = -M; m <= M; ++m) {
    const double a = y - x - 2.0 * m;
    const double b = y + x - 2.0 * m;
    sum += std::exp(-a * a * inv4tau) * (a * a * inv4tau / tau - half_inv_tau) -
           std::exp(-b * b * inv4tau) * (b * b * inv4tau / tau - half_inv_tau);
  }
  return nu * sum / std::sqrt(4.0 * kPi * tau);
}

int spectral_terms_for(double t, double nu) {
  const double tau = effective_time(t, nu);
  const double cutoff = std::log(1e16);
  const double jmin = std::sqrt(cutoff / (kPi * kPi * tau));
  const double J = std::floor(jmin) + 1.0;
  return static_cast<int>(std::min<double>(J, kMaxSpectralTerms));
}

double g_spectral(double t, double x, double y, double nu, int J) {
  const double tau = effective_time(t, nu);
  if (J <= 0) J = spectral_terms_for(t, nu);
  double sum = 0.0;
  for (int j = 1; j <= J; ++j) {
    const double jp = j * kPi;
    sum += std::exp(-jp * jp * tau) * std::sin(jp * x) * std::sin(jp * y);
  }
  return 2.0 * sum;
}

double heat_kernel(double t, double x, double y, double nu) {
  const double tau = effective_time(t, nu);
  return tau <= kRepresentationCrossover ? g_image(t, x, y, nu) : g_spectral(t, x, y, nu);
}

void to_json(nlohmann::json& j, const BoundReport& r) {
  j = nlohmann::json{{"bound_id", r.bound_id},
                     {"a_constant", r.a_constant},
                     {"empirical_C", r.empirical_C},
                     {"n_samples", r.n_samples},
                     {"pass", r.pass}};
}

namespace {

// Tracks a running sup together with the sup restricted to the two smallest
// decades of t, which is what the exponent-conformance check needs.
struct ScaledSup {
  double overall = 0.0;
  double first_decade = 0.0;
  double second_decade = 0.0;
  long samples = 0;
  bool finite = true;

  void add(double value, double t, double t_min) {
    ++samples;
    if (!std::isfinite(value)) {
      finite = false;
      return;
    }
    overall = std::max(overall, value);
    if (t < 10.0 * t_min) {
      first_decade = std::max(first_decade, value);
    } else if (t < 100.0 * t_min) {
      second_decade = std::max(second_decade, value);
    }
  }

  BoundReport report(std::string id, double a, double max_growth) const {
    BoundReport r;
    r.bound_id = std::move(id);
    r.a_constant = a;
    r.empirical_C = overall;
    r.n_samples = samples;
    r.growth_ratio = second_decade > 0.0 ? first_decade / second_decade : 1.0;
    r.pass = finite && r.growth_ratio <= max_growth;
    return r;
  }
};

// |value| * factor * exp(exponent) without overflowing the envelope.
double envelope_scaled(double value, double factor, double exponent) {
  if (value == 0.0) return 0.0;
  return std::exp(std::log(std::abs(value) * factor) + exponent);
}

}  // namespace

std::vector<BoundReport> verify_kernel_bounds(std::span<const double> t_samples,
                                              std::span<const double> xy_samples, double nu) {
  if (t_samples.empty()) return {};
  for (double t : t_samples) {
    if (!(t > 0.0)) throw Error(ErrorKind::SingularTime, "bound sample with t <= 0");
  }
  const double a = 8.0 * nu;
  const double t_min = *std::min_element(t_samples.begin(), t_samples.end());
  // A correct time exponent keeps the scaled sup flat as t -> 0; a missing
  // half power would multiply it by sqrt(10) per decade.
  constexpr double kMaxGrowth = 1.5;

  ScaledSup a1, a2, a3, a5;
  for (double t : t_samples) {
    for (double x : xy_samples) {
      for (double y : xy_samples) {
        const double d = x - y;
        const double exponent = d * d / (a * t);
        a1.add(envelope_scaled(g_image(t, x, y, nu), std::sqrt(t), exponent), t, t_min);
        a2.add(envelope_scaled(dg_dy(t, x, y, nu), t, exponent), t, t_min);
        a3.add(envelope_scaled(dg_dt(t, x, y, nu), t * std::sqrt(t), exponent), t, t_min);
        if (x == y) continue;
        const double holder = 0.5;
        const double scale = std::pow(std::abs(d), holder) * std::pow(t, -0.5 * holder - 0.5);
        for (double z : xy_samples) {
          const double gx = g_image(t, x, z, nu);
          const double gy = g_image(t, y, z, nu);
          const double ex = std::exp(-(x - z) * (x - z) / (a * t));
          const double ey = std::exp(-(y - z) * (y - z) / (a * t));
          const double denom = scale * std::max(ex, ey);
          if (denom > 0.0) a5.add(std::abs(gx - gy) / denom, t, t_min);
        }
      }
    }
  }

  std::vector<BoundReport> out;
  BoundReport r1 = a1.report("A1", a, kMaxGrowth);
  r1.reference_C = 1.0 / std::sqrt(4.0 * kPi * nu);
  out.push_back(r1);
  out.push_back(a2.report("A2", a, kMaxGrowth));
  out.push_back(a3.report("A3", a, kMaxGrowth));
  out.push_back(a5.report("A5", a, kMaxGrowth));

  for (int p : {1, 2, 4}) {
    // || exp(-|x - .|^2 / (a tau)) ||_{L^p(0,1)} / tau^{1/(2p)}; over the whole
    // line the ratio is exactly (pi a / p)^{1/(2p)}.
    BoundReport r;
    r.bound_id = "A7[p=" + std::to_string(p) + "]";
    r.a_constant = a;
    r.reference_C = std::pow(kPi * a / p, 1.0 / (2.0 * p));
    bool finite = true;
    for (double t : t_samples) {
      for (double x : xy_samples) {
        const double integral = quad::composite_gl8(
            [&](double y) { return std::exp(-p * (x - y) * (x - y) / (a * t)); }, 0.0, 1.0, 64);
        const double ratio = std::pow(integral, 1.0 / p) / std::pow(t, 1.0 / (2.0 * p));
        finite = finite && std::isfinite(ratio);
        r.empirical_C = std::max(r.empirical_C, ratio);
        ++r.n_samples;
      }
    }
    r.pass = finite && r.empirical_C <= r.reference_C * (1.0 + 1e-9);
    out.push_back(r);
  }
  return out;
}

double kernel_mass(double t, double x, double nu, int panels) {
  return quad::composite_gl8([&](double y) { return heat_kernel(t, x, y, nu); }, 0.0, 1.0, panels);
}

double chapman_kolmogorov(double t, double x, double y, double nu, int panels) {
  const double half = 0.5 * t;
  return quad::composite_gl8(
      [&](double z) { return heat_kernel(half, x, z, nu) * heat_kernel(half, z, y, nu); }, 0.0, 1.0,
      panels);
}

KernelConsistency check_kernel_consistency(double nu, int lattice) {
  KernelConsistency out;
  std::vector<double> taus;
  for (int k = 0; k <= 12; ++k) taus.push_back(1e-3 * std::pow(1000.0, k / 12.0));
  for (double tau : taus) {
    const double t = tau / nu;
    for (int i = 0; i < lattice; ++i) {
      const double x = static_cast<double>(i) / (lattice - 1);
      for (int k = 0; k < lattice; ++k) {
        const double y = static_cast<double>(k) / (lattice - 1);
        const double gap = std::abs(g_image(t, x, y, nu) - g_spectral(t, x, y, nu));
        out.max_representation_gap = std::max(out.max_representation_gap, gap);
      }
    }
  }
  for (double tau : {1e-3, 1e-2, 0.05, 0.1, 0.25}) {
    const double t = tau / nu;
    for (double x : {0.1, 0.3, 0.5}) {
      for (double y : {0.2, 0.5, 0.9}) {
        const double gap = std::abs(chapman_kolmogorov(t, x, y, nu) - heat_kernel(t, x, y, nu));
        out.max_chapman_kolmogorov_gap = std::max(out.max_chapman_kolmogorov_gap, gap);
      }
    }
  }
  for (double x : {0.05, 0.3, 0.5, 0.8}) {
    double previous = std::numeric_limits<double>::infinity();
    for (double tau : taus) {
      const double mass = kernel_mass(tau / nu, x, nu);
      if (!(mass > 0.0 && mass <= 1.0 + 1e-12)) out.mass_in_unit_interval = false;
      if (mass > previous + 1e-12) out.mass_monotone_in_t = false;
      previous = mass;
    }
  }
  return out;
}

}  // namespace sgbh
