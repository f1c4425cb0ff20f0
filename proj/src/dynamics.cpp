// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "sgbh/error.hpp"
#include "sgbh/simd/kernels.hpp"

namespace sgbh {

using simd::detail::ipow;

std::vector<std::string> ModelParams::violations() const {
  std::vector<std::string> out;
  if (!(nu > 0.0)) out.emplace_back("nu must be > 0");
  if (!(alpha >= 0.0)) out.emplace_back("alpha must be >= 0");
  if (!(beta >= 0.0)) out.emplace_back("beta must be >= 0");
  if (!(gamma >= 1.0)) out.emplace_back("gamma must be >= 1");
  if (delta < 1) out.emplace_back("delta must be an integer >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) out.emplace_back("epsilon must lie in [0, 1]");
  return out;
}

void ModelParams::validate() const {
  const auto v = violations();
  if (!v.empty()) throw Error(ErrorKind::InvalidArgument, v.front());
}

GCoefficient GCoefficient::constant(double K) { return {GFamily::Constant, K, 0.0}; }

GCoefficient GCoefficient::linear(double K) { return {GFamily::Linear, K, K}; }

GCoefficient GCoefficient::bounded_sigmoid(double K, double L) {
  if (!(K > 0.0)) throw Error(ErrorKind::InvalidArgument, "bounded sigmoid needs K > 0");
  return {GFamily::BoundedSigmoid, K, L};
}

double GCoefficient::operator()(double r) const {
  switch (family) {
    case GFamily::Constant:
      return K;
    case GFamily::Linear:
      return K * std::sqrt(0.5 * (1.0 + r * r));
    case GFamily::BoundedSigmoid:
      return K * std::tanh(L * r / K);
  }
  return 0.0;
}

double GCoefficient::derivative(double r) const {
  switch (family) {
    case GFamily::Constant:
      return 0.0;
    case GFamily::Linear:
      return K * r / std::sqrt(2.0 * (1.0 + r * r));
    case GFamily::BoundedSigmoid: {
      const double th = std::tanh(L * r / K);
      return L * (1.0 - th * th);
    }
  }
  return 0.0;
}

std::vector<std::string> GCoefficient::violations() const {
  std::vector<std::string> out;
  if (!std::isfinite(K) || K < 0.0) out.emplace_back("g.K must be finite and >= 0");
  if (family == GFamily::BoundedSigmoid) {
    if (!(K > 0.0)) out.emplace_back("bounded_sigmoid needs K > 0");
    if (!std::isfinite(L) || L < 0.0) out.emplace_back("g.L must be finite and >= 0");
  }
  return out;
}

std::string to_string(GFamily family) {
  switch (family) {
    case GFamily::Constant:
      return "constant";
    case GFamily::Linear:
      return "linear";
    case GFamily::BoundedSigmoid:
      return "bounded_sigmoid";
  }
  return "unknown";
}

double p_nl(double u, int delta) { return ipow(u, delta + 1); }

double p_nl_derivative(double u, int delta) { return (delta + 1) * ipow(u, delta); }

double c_nl(double u, int delta, double gamma) {
  const double ud = ipow(u, delta);
  return u * (1.0 - ud) * (ud - gamma);
}

double c_nl_derivative(double u, int delta, double gamma) {
  // c = -u^(2d+1) + (1+gamma) u^(d+1) - gamma u
  const double ud = ipow(u, delta);
  return -(2 * delta + 1) * ud * ud + (1.0 + gamma) * (delta + 1) * ud - gamma;
}

double cutoff(double r, double R) {
  const double theta = std::abs(r) - R;
  if (theta <= 0.0) return 1.0;
  if (theta >= 1.0) return 0.0;
  return 1.0 - theta * theta * (3.0 - 2.0 * theta);
}

double cutoff_derivative(double r, double R) {
  const double theta = std::abs(r) - R;
  if (theta <= 0.0 || theta >= 1.0) return 0.0;
  const double d = 6.0 * theta * (theta - 1.0);
  return r < 0.0 ? -d : d;
}

double g_eval(const GCoefficient& coeff, double, double, double r) { return coeff(r); }

int default_monitor_p(int delta) {
  const int floor = std::max(6, 2 * delta + 1);
  int p = floor + 1;
  if (p % 2 != 0) ++p;
  return p;
}

}  // namespace sgbh
