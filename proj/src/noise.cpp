// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sgbh/error.hpp"
#include "sgbh/simd/kernels.hpp"

namespace sgbh {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform in (0, 1].
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Block Philox4x32::generate(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

void Philox4x32::normals(std::uint64_t stream, std::uint64_t step, std::size_t count,
                         double* out) const {
  const auto step_lo = static_cast<std::uint32_t>(step);
  const auto stream_lo = static_cast<std::uint32_t>(stream);
  const auto stream_hi = static_cast<std::uint32_t>(stream >> 32);
  for (std::size_t pair = 0; 2 * pair < count; ++pair) {
    const Block r = generate({static_cast<std::uint32_t>(pair), step_lo, stream_lo, stream_hi}, key_);
    const double u1 = open_unit(r[0], r[1]);
    const double u2 = open_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[2 * pair] = radius * std::cos(angle);
    if (2 * pair + 1 < count) out[2 * pair + 1] = radius * std::sin(angle);
  }
}

NoiseSpec NoiseSpec::colored(double eta, int modes, std::uint64_t seed, std::uint64_t stream_id) {
  if (!(eta > 0.25)) {
    throw Error(ErrorKind::TraceCondition,
                "colored noise needs eta > 1/4 for sum q_j^2 < inf, got eta = " +
                    std::to_string(eta));
  }
  if (modes < 0) throw Error(ErrorKind::InvalidArgument, "mode count must be >= 0");
  NoiseSpec s;
  s.regime = NoiseRegime::ColoredQ;
  s.eta = eta;
  s.modes = modes;
  s.seed = seed;
  s.stream_id = stream_id;
  return s;
}

NoiseSpec NoiseSpec::colored_weights(std::vector<double> q, std::uint64_t seed,
                                     std::uint64_t stream_id) {
  if (q.empty()) throw Error(ErrorKind::InvalidArgument, "explicit weight list is empty");
  for (double v : q) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "noise weights must be finite and non-negative");
    }
  }
  NoiseSpec s;
  s.regime = NoiseRegime::ColoredQ;
  s.modes = static_cast<int>(q.size());
  s.weights = std::move(q);
  s.seed = seed;
  s.stream_id = stream_id;
  return s;
}

NoiseSpec NoiseSpec::white(std::uint64_t seed, std::uint64_t stream_id) {
  NoiseSpec s;
  s.regime = NoiseRegime::SpaceTimeWhite;
  s.seed = seed;
  s.stream_id = stream_id;
  return s;
}

double NoiseSpec::q(int j) const {
  if (!weights.empty()) {
    return j >= 1 && static_cast<std::size_t>(j) <= weights.size() ? weights[j - 1] : 0.0;
  }
  return std::pow(eigenpair(j).lambda, -eta);
}

int NoiseSpec::resolved_modes(std::size_t n) const {
  if (regime != NoiseRegime::ColoredQ) return 0;
  if (modes > 0) return modes;
  return static_cast<int>(std::min<std::size_t>(n, 128));
}

double NoiseSpec::trace(int J) const {
  double s = 0.0;
  for (int j = 1; j <= J; ++j) s += q(j) * q(j);
  return s;
}

NoiseGenerator::NoiseGenerator(const NoiseSpec& spec, const Grid& grid)
    : spec_(spec), grid_(grid), rng_(spec.seed) {
  if (spec_.regime == NoiseRegime::ColoredQ) {
    if (spec_.weights.empty() && !(spec_.eta > 0.25)) {
      throw Error(ErrorKind::TraceCondition, "colored noise needs eta > 1/4");
    }
    modes_ = spec_.resolved_modes(grid.size());
    const std::size_t n = grid.size();
    basis_.resize(static_cast<std::size_t>(modes_) * n);
    for (int j = 1; j <= modes_; ++j) {
      const EigenPair e = eigenpair(j);
      const double qj = spec_.q(j);
      for (std::size_t i = 0; i < n; ++i) basis_[(j - 1) * n + i] = qj * e.phi(grid.node(i));
    }
  }
}

std::size_t NoiseGenerator::draws_per_step() const noexcept {
  return spec_.regime == NoiseRegime::ColoredQ ? static_cast<std::size_t>(modes_) : grid_.size();
}

void NoiseGenerator::sample(std::uint64_t stream, std::uint64_t step, double dt,
                            std::span<double> out, std::span<double> scratch) const {
  const std::size_t n = grid_.size();
  const std::size_t draws = draws_per_step();
  rng_.normals(stream, step, draws, scratch.data());
  if (spec_.regime == NoiseRegime::ColoredQ) {
    const double root_dt = std::sqrt(dt);
    for (std::size_t j = 0; j < draws; ++j) scratch[j] *= root_dt;
    simd::active().mode_synthesis(basis_.data(), scratch.data(), draws, n, out.data());
  } else {
    const double scale = std::sqrt(dt / grid_.h());
    for (std::size_t i = 0; i < n; ++i) out[i] = scale * scratch[i];
  }
}

NoiseIncrement NoiseGenerator::sample(std::uint64_t step, double dt) const {
  NoiseIncrement inc{dt, Field::zeros(grid_)};
  std::vector<double> scratch(std::max<std::size_t>(draws_per_step(), 1));
  sample(spec_.stream_id, step, dt, inc.values.values, scratch);
  return inc;
}

std::vector<double> NoiseGenerator::covariance_per_unit_time() const {
  const std::size_t n = grid_.size();
  std::vector<double> c(n * n, 0.0);
  if (spec_.regime == NoiseRegime::SpaceTimeWhite) {
    for (std::size_t i = 0; i < n; ++i) c[i * n + i] = 1.0 / grid_.h();
    return c;
  }
  for (int j = 0; j < modes_; ++j) {
    const double* row = basis_.data() + static_cast<std::size_t>(j) * n;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) c[i * n + k] += row[i] * row[k];
    }
  }
  return c;
}

NoiseIncrement sample_colored_increment(const NoiseSpec& spec, const Grid& grid, double dt,
                                        std::uint64_t step) {
  if (spec.regime != NoiseRegime::ColoredQ) {
    throw Error(ErrorKind::InvalidArgument, "sample_colored_increment needs a ColoredQ spec");
  }
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  return NoiseGenerator(spec, grid).sample(step, dt);
}

NoiseIncrement sample_white_increment(const NoiseSpec& spec, const Grid& grid, double dt,
                                      std::uint64_t step) {
  if (spec.regime != NoiseRegime::SpaceTimeWhite) {
    throw Error(ErrorKind::InvalidArgument, "sample_white_increment needs a SpaceTimeWhite spec");
  }
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  return NoiseGenerator(spec, grid).sample(step, dt);
}

Field brownian_sheet_checkpoint(const NoiseSpec& spec, const Grid& grid, double t, double dt) {
  if (!(dt > 0.0) || t < 0.0) throw Error(ErrorKind::InvalidArgument, "need dt > 0 and t >= 0");
  const double ratio = t / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, steps)) {
    throw Error(ErrorKind::Alignment, "t = " + std::to_string(t) +
                                          " is not a multiple of dt = " + std::to_string(dt));
  }
  const NoiseGenerator gen(spec, grid);
  Field sheet = Field::zeros(grid);
  std::vector<double> inc(grid.size());
  std::vector<double> scratch(std::max<std::size_t>(gen.draws_per_step(), 1));
  for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(steps); ++k) {
    gen.sample(spec.stream_id, k, dt, inc, scratch);
    for (std::size_t i = 0; i < grid.size(); ++i) sheet.values[i] += inc[i];
  }
  return sheet;
}

}  // namespace sgbh
