// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include <json.hpp>

#include "sgbh/config.hpp"
#include "sgbh/io.hpp"
#include "sgbh/kernel.hpp"
#include "sgbh/ldp.hpp"
#include "sgbh/parallel.hpp"
#include "sgbh/simd/kernels.hpp"
#include "sgbh/skeleton.hpp"
#include "sgbh/solver.hpp"

namespace sgbh {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  int threads = 0;
  std::vector<std::string> artifacts;
  json summary = json::object();

  void csv_trajectory(const std::string& name, const Trajectory& t) {
    io::write_trajectory_csv(dir / name, t);
    artifacts.push_back(name);
  }
  void json_file(const std::string& name, const json& j) {
    io::write_json(dir / name, j);
    artifacts.push_back(name);
  }
};

ExperimentConfig experiment_config(const RunConfig& cfg, int threads) {
  ExperimentConfig ec;
  ec.u0 = cfg.initial_field();
  ec.params = cfg.model;
  ec.T = cfg.T;
  ec.dt = cfg.dt;
  ec.noise = cfg.noise;
  ec.g = cfg.g;
  ec.truncation = cfg.truncation;
  ec.p = cfg.effective_monitor_p();
  ec.threads = threads;
  if (!cfg.control.empty()) {
    const Field shape = Field::modes(ec.u0.grid, cfg.control);
    ec.control = Control::constant_in_time(shape, static_cast<std::size_t>(step_count(cfg.T, cfg.dt)), cfg.dt);
  }
  return ec;
}

Control config_control(const RunConfig& cfg, const Grid& grid) {
  const auto steps = static_cast<std::size_t>(step_count(cfg.T, cfg.dt));
  if (cfg.control.empty()) return Control::zeros(grid, steps, cfg.dt);
  return Control::constant_in_time(Field::modes(grid, cfg.control), steps, cfg.dt);
}

json kernel_report(double nu, bool& pass) {
  std::vector<double> ts, xs;
  for (int k = 0; k < 25; ++k) ts.push_back(1e-3 * std::pow(250.0, k / 24.0));
  for (int i = 0; i <= 20; ++i) xs.push_back(i / 20.0);
  const auto bounds = verify_kernel_bounds(ts, xs, nu);
  const KernelConsistency kc = check_kernel_consistency(nu);
  pass = kc.max_representation_gap <= 1e-9 && kc.max_chapman_kolmogorov_gap <= 1e-8 &&
         kc.mass_in_unit_interval && kc.mass_monotone_in_t;
  json jb = json::array();
  for (const auto& b : bounds) {
    jb.push_back(b);
    pass = pass && b.pass;
  }
  return json{{"nu", nu},
              {"bounds", jb},
              {"max_representation_gap", kc.max_representation_gap},
              {"max_chapman_kolmogorov_gap", kc.max_chapman_kolmogorov_gap},
              {"mass_in_unit_interval", kc.mass_in_unit_interval},
              {"mass_monotone_in_t", kc.mass_monotone_in_t},
              {"pass", pass}};
}

void run_simulate(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const Field u0 = cfg.initial_field();
  IntegrateOptions options;
  options.save_stride = cfg.save_stride;
  options.p = cfg.effective_monitor_p();
  options.monitor_R = cfg.monitor_R;
  options.truncation = cfg.truncation;
  const Control phi = config_control(cfg, u0.grid);
  if (!cfg.control.empty()) options.control = phi.values;
  const auto result = integrate(u0, cfg.model, cfg.T, cfg.dt, cfg.noise, cfg.g, options);
  ctx.csv_trajectory("trajectory.csv", result.trajectory);
  io::write_energy_csv(ctx.dir / "energy.csv", result.ledger);
  ctx.artifacts.push_back("energy.csv");
  const AuditReport audit = energy_audit(result.ledger, cfg.model, options.p, u0);
  ctx.summary["monitor_p"] = options.p;
  ctx.summary["tau_R_step"] = result.tau_R_step ? json(*result.tau_R_step) : json(nullptr);
  ctx.summary["audit"] = {{"sup_lp_power", audit.sup_lp_power},
                          {"dissipation_term", audit.dissipation_term},
                          {"reaction_term", audit.reaction_term},
                          {"audited", audit.audited},
                          {"ratio", audit.ratio}};
  const Field& last = result.trajectory.final();
  ctx.summary["final_l2_norm"] = last.lp_norm(2.0);
  ctx.summary["final_mode1"] = project(last, 1);
}

void run_skeleton(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const Field u0 = cfg.initial_field();
  const Control phi = config_control(cfg, u0.grid);
  const Trajectory traj = solve_skeleton(u0, cfg.model, cfg.g, phi, cfg.T, cfg.dt);
  Trajectory saved = traj;
  saved.times.clear();
  saved.fields.clear();
  for (std::size_t k = 0; k < traj.fields.size(); ++k) {
    if (k % static_cast<std::size_t>(cfg.save_stride) == 0 || k + 1 == traj.fields.size()) {
      saved.times.push_back(traj.times[k]);
      saved.fields.push_back(traj.fields[k]);
    }
  }
  ctx.csv_trajectory("trajectory.csv", saved);
  io::write_control_csv(ctx.dir / "control.csv", phi);
  ctx.artifacts.push_back("control.csv");
  ctx.summary["control_cost"] = phi.cost();
  ctx.summary["final_mode1"] = project(traj.final(), 1);
}

void write_rate(Context& ctx, const RateResult& r) {
  ctx.json_file("rate.json", json(r));
  io::write_control_csv(ctx.dir / "control.csv", r.control);
  ctx.artifacts.push_back("control.csv");
}

void run_rate(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const Field u0 = cfg.initial_field();
  const Field target = Field::modes(u0.grid, cfg.rate.target);
  const EndpointEvent event = cfg.rate.event == "ball" ? EndpointEvent::ball(target, cfg.rate.radius)
                                                       : EndpointEvent::target(target);
  try {
    const RateResult r = rate_function_event(u0, cfg.model, cfg.g, event, cfg.T, cfg.dt, cfg.rate.optimizer);
    write_rate(ctx, r);
    ctx.summary["mu"] = r.mu;
  } catch (const NonconvergenceError& e) {
    write_rate(ctx, e.best());
    throw;
  }
}

EventSpec mc_event(const RunConfig& cfg, const ExperimentConfig& ec) {
  const NormKind norm = cfg.mc.norm == "sup" ? NormKind::Sup : NormKind::Lp;
  const double p = cfg.mc.norm == "l2" ? 2.0 : cfg.mc.p;
  if (cfg.mc.event == "tube") {
    const Control phi = config_control(cfg, ec.u0.grid);
    Trajectory ref = solve_skeleton(ec.u0, cfg.model, cfg.g, phi, cfg.T, cfg.dt);
    return EventSpec::tube_exceed(std::move(ref.fields), cfg.mc.radius, norm, p, "tube around the skeleton path");
  }
  return EventSpec::terminal_ball(Field::modes(ec.u0.grid, cfg.mc.center), cfg.mc.radius, norm, p,
                                  "terminal ball");
}

void write_curve(Context& ctx, const std::vector<MCEstimate>& points) {
  io::write_mc_csv(ctx.dir / "mc.csv", points);
  ctx.artifacts.push_back("mc.csv");
}

void run_mc(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const ExperimentConfig ec = experiment_config(cfg, ctx.threads);
  const EventSpec event = mc_event(cfg, ec);
  double reference = std::numeric_limits<double>::quiet_NaN();
  if (cfg.mc.rate_reference && event.kind == EventSpec::Kind::TerminalBall && cfg.mc.norm == "l2" &&
      !ec.control) {
    reference = ball_rate(event, ec, cfg.rate.optimizer).value;
  }
  try {
    const LdpCurve curve = ldp_curve(event, ec, cfg.mc.eps_ladder, cfg.mc.samples, reference);
    write_curve(ctx, curve.points);
    ctx.summary["intercept"] = curve.intercept;
    ctx.summary["slope"] = curve.slope;
    ctx.summary["rate_estimate"] = curve.rate_estimate;
    ctx.summary["rate_reference"] = std::isnan(reference) ? json(nullptr) : json(reference);
  } catch (const UnestimableError& e) {
    write_curve(ctx, e.partial());
    throw;
  }
}

void run_uniform(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  ExperimentConfig ec = experiment_config(cfg, ctx.threads);
  ec.control.reset();
  UniformConfig uc;
  const auto steps = static_cast<std::size_t>(step_count(cfg.T, cfg.dt));
  uc.u0_set = sample_initial_conditions(ec.u0.grid, cfg.uniform.u0_count, cfg.uniform.u0_bound, cfg.uniform.p);
  uc.phi_set = sample_controls(ec.u0.grid, steps, cfg.dt, cfg.uniform.phi_count, cfg.uniform.phi_bound);
  uc.eps_ladder = cfg.uniform.eps_ladder;
  uc.eta = cfg.uniform.eta;
  uc.n_samples = cfg.uniform.samples;
  uc.p = cfg.uniform.p;
  uc.threshold = cfg.uniform.threshold;
  const UniformReport report = uniform_convergence_experiment(ec, uc);
  io::write_uniform_csv(ctx.dir / "uniform.csv", report);
  ctx.artifacts.push_back("uniform.csv");
  json members_u0 = json::array();
  for (const Field& u : uc.u0_set) members_u0.push_back({{"lp_norm", u.lp_norm(uc.p)}, {"values", u.values}});
  json members_phi = json::array();
  for (const Control& c : uc.phi_set) members_phi.push_back({{"cost", c.cost()}});
  ctx.summary["u0_set"] = members_u0;
  ctx.summary["phi_set"] = members_phi;
  ctx.summary["monotone"] = report.monotone;
  ctx.summary["below_threshold"] = report.below_threshold;
}

void run_decompose(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const ExperimentConfig ec = experiment_config(cfg, ctx.threads);
  IntegrateOptions options;
  options.record_energy = false;
  options.retain_noise = true;
  options.truncation = ec.truncation;
  options.p = ec.p;
  if (ec.control) options.control = ec.control->values;
  const auto run = integrate(ec.u0, ec.params, ec.T, ec.dt, ec.noise, ec.g, options);
  const Decomposition d = decompose_z_zeta(run.trajectory, ec.g);
  ctx.csv_trajectory("trajectory.csv", run.trajectory);
  ctx.csv_trajectory("z.csv", d.z);
  ctx.csv_trajectory("zeta.csv", d.zeta);
  ctx.summary["zeta_star"] = d.zeta_star;
  if (cfg.decompose.paths > 1) {
    const auto stars = zeta_star_samples(ec, cfg.decompose.paths);
    double m = 0.0;
    for (double s : stars) m += std::pow(s, cfg.decompose.moment);
    ctx.summary["paths"] = cfg.decompose.paths;
    ctx.summary["moment_order"] = cfg.decompose.moment;
    ctx.summary["zeta_star_moment"] = m / static_cast<double>(stars.size());
  }
}

void run_kernel_check(Context& ctx, bool& pass) {
  const double nu = ctx.cfg.kernel_nu > 0.0 ? ctx.cfg.kernel_nu : ctx.cfg.model.nu;
  const json report = kernel_report(nu, pass);
  ctx.json_file("bounds.json", report);
}

fs::path resolve_output_dir(const RunConfig& cfg, const RunOptions& options) {
  if (options.output_dir) return *options.output_dir;
  if (const char* env = std::getenv("SGBH_OUTPUT_DIR"); env && *env) return env;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return "sgbh_out";
}

}  // namespace

int run_config(const std::string& path, const RunOptions& options, std::ostream& out,
               std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(path);
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues()) err << format_issue(path, issue) << '\n';
    return kExitConfig;
  }
  const ValidationReport rep = validate(cfg);
  for (const auto& w : rep.warnings) err << "warning: " << format_issue(path, w) << '\n';
  if (!rep.ok()) {
    for (const auto& v : rep.violations) err << format_issue(path, v) << '\n';
    return kExitConfig;
  }

  const int threads = options.threads > 0 ? options.threads : default_threads();
  set_default_threads(threads);
  Context ctx{cfg, resolve_output_dir(cfg, options), threads, {}, json::object()};
  fs::create_directories(ctx.dir);
  ctx.summary["config_hash"] = cfg.hash;
  ctx.summary["experiment"] = cfg.experiment;
  if (cfg.noise.regime == NoiseRegime::ColoredQ) {
    ctx.summary["noise_trace"] = cfg.noise.trace(cfg.noise.resolved_modes(cfg.n_interior));
  }

  const auto start = std::chrono::steady_clock::now();
  int code = kExitOk;
  json error = nullptr;
  try {
    const std::string& e = cfg.experiment;
    if (e == "simulate") {
      run_simulate(ctx);
    } else if (e == "skeleton") {
      run_skeleton(ctx);
    } else if (e == "rate") {
      run_rate(ctx);
    } else if (e == "mc") {
      run_mc(ctx);
    } else if (e == "uniform") {
      run_uniform(ctx);
    } else if (e == "decompose") {
      run_decompose(ctx);
    } else if (e == "kernel-check") {
      bool pass = true;
      run_kernel_check(ctx, pass);
      if (!pass) code = kExitFailure;
    }
  } catch (const Error& e) {
    error = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}, {"config_hash", cfg.hash}};
    if (const auto* se = dynamic_cast<const StepError*>(&e)) error["step"] = se->step();
    if (is_numerical(e.kind())) {
      code = kExitNumerical;
    } else {
      code = kExitConfig;
    }
    err << path << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    error = {{"kind", "io"}, {"message", e.what()}, {"config_hash", cfg.hash}};
    err << path << ": " << e.what() << '\n';
    code = kExitFailure;
  }
  if (!error.is_null()) ctx.json_file("error.json", error);
  ctx.json_file("summary.json", ctx.summary);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"config_path", cfg.path},
                   {"config_hash", cfg.hash},
                   {"experiment", cfg.experiment},
                   {"version", kVersion},
                   {"simd", simd::active().name},
                   {"threads", threads},
                   {"wall_time_seconds", wall},
                   {"exit_code", code},
                   {"artifacts", ctx.artifacts}};
  io::write_json(ctx.dir / "manifest.json", manifest);
  out << "wrote " << ctx.artifacts.size() + 1 << " artifacts to " << ctx.dir.string() << '\n';
  return code;
}

int validate_config(const std::string& path, std::ostream& out, std::ostream& err) {
  const ValidationReport rep = validate_file(path);
  for (const auto& w : rep.warnings) out << "warning: " << format_issue(path, w) << '\n';
  for (const auto& v : rep.violations) err << format_issue(path, v) << '\n';
  if (rep.ok()) {
    out << path << ": ok\n";
    return kExitOk;
  }
  return kExitConfig;
}

int kernel_check(double nu, const std::optional<std::string>& output_dir, std::ostream& out,
                 std::ostream& err) {
  if (!(nu > 0.0)) {
    err << "kernel-check: nu must be > 0\n";
    return kExitConfig;
  }
  bool pass = true;
  const json report = kernel_report(nu, pass);
  out << report.dump(2) << '\n';
  if (output_dir) io::write_json(fs::path(*output_dir) / "bounds.json", report);
  return pass ? kExitOk : kExitFailure;
}

}  // namespace sgbh
