// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace sgbh {

struct ModelParams {
  double nu = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
  int delta = 1;
  double epsilon = 0.0;

  /// Human-readable list of violated parameter constraints (empty when valid).
  std::vector<std::string> violations() const;
  /// Throws Error(InvalidArgument) naming the first violation.
  void validate() const;
};

enum class GFamily { Constant, Linear, BoundedSigmoid };

/// Noise coefficient g(r), autonomous in (t, x).
///   Constant(K):          g = K
///   Linear(K):            g = K sqrt(1 + r^2) / sqrt(2), Lipschitz constant K
///   BoundedSigmoid(K, L): g = K tanh(L r / K)
struct GCoefficient {
  GFamily family = GFamily::Constant;
  double K = 1.0;
  double L = 0.0;

  static GCoefficient constant(double K);
  static GCoefficient linear(double K);
  static GCoefficient bounded_sigmoid(double K, double L);

  double operator()(double r) const;
  double derivative(double r) const;
  /// True for the families with a global bound |g| <= K.
  bool bounded() const noexcept { return family != GFamily::Linear; }
  bool is_constant() const noexcept { return family == GFamily::Constant; }
  std::vector<std::string> violations() const;
};

std::string to_string(GFamily family);

/// u^(delta+1)
double p_nl(double u, int delta);
double p_nl_derivative(double u, int delta);

/// u (1 - u^delta) (u^delta - gamma)
double c_nl(double u, int delta, double gamma);
double c_nl_derivative(double u, int delta, double gamma);

/// C^1 cutoff: 1 for |r| <= R, 0 for |r| >= R + 1, smoothstep bridge in between.
double cutoff(double r, double R);
double cutoff_derivative(double r, double R);

double g_eval(const GCoefficient& coeff, double t, double x, double r);

/// Smallest even integer strictly above max(6, 2 delta + 1).
int default_monitor_p(int delta);

}  // namespace sgbh
