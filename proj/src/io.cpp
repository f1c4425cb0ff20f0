// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sgbh/error.hpp"

namespace sgbh::io {
namespace {

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void write_row(std::ofstream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_double(values[i]);
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  auto out = open(path);
  out << 't';
  for (std::size_t i = 1; i <= trajectory.grid.size(); ++i) out << ",x_" << i;
  out << '\n';
  std::vector<double> row;
  for (std::size_t k = 0; k < trajectory.fields.size(); ++k) {
    row.assign(1, trajectory.times[k]);
    row.insert(row.end(), trajectory.fields[k].values.begin(), trajectory.fields[k].values.end());
    write_row(out, row);
  }
}

void write_energy_csv(const std::filesystem::path& path, const EnergyLedger& ledger) {
  auto out = open(path);
  out << "t,lp_norm_p,dissipation,reaction\n";
  for (std::size_t k = 0; k < ledger.t.size(); ++k) {
    write_row(out, {ledger.t[k], ledger.lp_power[k], ledger.dissipation[k], ledger.reaction[k]});
  }
}

void write_mc_csv(const std::filesystem::path& path, const std::vector<MCEstimate>& estimates) {
  auto out = open(path);
  out << "eps,p_hat,ci_lo,ci_hi,eps_log_p,rate_reference\n";
  for (const auto& e : estimates) {
    const double elp = e.eps_log_p ? *e.eps_log_p : -std::numeric_limits<double>::infinity();
    write_row(out, {e.eps, e.p_hat, e.wilson_ci.lo, e.wilson_ci.hi, elp, e.rate_reference});
  }
}

void write_control_csv(const std::filesystem::path& path, const Control& control) {
  auto out = open(path);
  const std::size_t n = control.grid.size();
  for (std::size_t i = 1; i <= n; ++i) out << (i > 1 ? "," : "") << "x_" << i;
  out << '\n';
  for (std::size_t k = 0; k < control.steps; ++k) {
    const auto row = control.row(k);
    write_row(out, std::vector<double>(row.begin(), row.end()));
  }
}

void write_uniform_csv(const std::filesystem::path& path, const UniformReport& report) {
  auto out = open(path);
  out << "eps,worst_frequency,ci_lo,ci_hi,worst_u0,worst_phi\n";
  for (const auto& p : report.points) {
    write_row(out, {p.eps, p.worst_frequency, p.ci.lo, p.ci.hi, static_cast<double>(p.worst_u0),
                    static_cast<double>(p.worst_phi)});
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  auto out = open(path);
  out << value.dump(2) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open(path);
  out << text;
}

}  // namespace sgbh::io
