// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sgbh {
namespace {

using nlohmann::json;

const std::set<std::string> kExperiments = {"simulate", "skeleton",     "rate",     "mc",
                                            "uniform",  "kernel-check", "decompose"};

int line_at(const std::string& text, std::size_t pos) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + std::min(pos, text.size()), '\n'));
}

// Line of a dotted key path, found by scanning for successive "name": tokens.
int locate(const std::string& text, const std::string& dotted) {
  std::size_t pos = 0;
  int line = 1;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    const std::string quoted = "\"" + part + "\"";
    std::size_t at = pos;
    bool found = false;
    while ((at = text.find(quoted, at)) != std::string::npos) {
      std::size_t after = at + quoted.size();
      while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
      if (after < text.size() && text[after] == ':') {
        found = true;
        break;
      }
      at += quoted.size();
    }
    if (!found) return line;
    line = line_at(text, at);
    pos = at + quoted.size();
  }
  return line;
}

class Reader {
 public:
  Reader(const std::string& text, std::vector<ConfigIssue>& issues) : text_(text), issues_(issues) {}

  void issue(const std::string& key, const std::string& message) {
    issues_.push_back({locate(text_, key), key, message});
  }

  const json* block(const json& root, const std::string& name, const std::set<std::string>& allowed) {
    if (!root.contains(name)) return nullptr;
    const json& b = root.at(name);
    if (!b.is_object()) {
      issue(name, "expected an object");
      return nullptr;
    }
    check_keys(b, name, allowed);
    return &b;
  }

  void check_keys(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) {
        issue(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown key");
      }
    }
  }

  bool number(const json* obj, const std::string& prefix, const std::string& key, double& out) {
    if (!obj || !obj->contains(key)) return false;
    const json& v = obj->at(key);
    if (!v.is_number()) {
      issue(prefix + "." + key, "expected a number");
      return false;
    }
    out = v.get<double>();
    return true;
  }

  bool optional_number(const json* obj, const std::string& prefix, const std::string& key,
                       std::optional<double>& out) {
    if (!obj || !obj->contains(key) || obj->at(key).is_null()) return false;
    double v = 0.0;
    if (!number(obj, prefix, key, v)) return false;
    out = v;
    return true;
  }

  template <class Int>
  bool integer(const json* obj, const std::string& prefix, const std::string& key, Int& out) {
    double v = 0.0;
    if (!number(obj, prefix, key, v)) return false;
    if (v != std::floor(v) || std::abs(v) > 9e15) {
      issue(prefix + "." + key, "expected an integer");
      return false;
    }
    out = static_cast<Int>(v);
    return true;
  }

  bool string(const json* obj, const std::string& prefix, const std::string& key, std::string& out) {
    if (!obj || !obj->contains(key)) return false;
    const json& v = obj->at(key);
    if (!v.is_string()) {
      issue(prefix.empty() ? key : prefix + "." + key, "expected a string");
      return false;
    }
    out = v.get<std::string>();
    return true;
  }

  bool boolean(const json* obj, const std::string& prefix, const std::string& key, bool& out) {
    if (!obj || !obj->contains(key)) return false;
    const json& v = obj->at(key);
    if (!v.is_boolean()) {
      issue(prefix + "." + key, "expected true or false");
      return false;
    }
    out = v.get<bool>();
    return true;
  }

  bool numbers(const json* obj, const std::string& prefix, const std::string& key,
               std::vector<double>& out) {
    if (!obj || !obj->contains(key)) return false;
    const json& v = obj->at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      issue(prefix + "." + key, "expected an array of numbers");
      return false;
    }
    out.clear();
    for (const json& x : v) out.push_back(x.get<double>());
    return true;
  }

  bool modes(const json* obj, const std::string& prefix, const std::string& key, ModeList& out) {
    if (!obj || !obj->contains(key)) return false;
    const json& v = obj->at(key);
    auto pair_ok = [](const json& x) {
      return x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number() &&
             x[0].get<double>() == std::floor(x[0].get<double>());
    };
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), pair_ok)) {
      issue(prefix + "." + key, "expected an array of [mode index, amplitude] pairs");
      return false;
    }
    out.clear();
    for (const json& x : v) out.emplace_back(static_cast<int>(x[0].get<double>()), x[1].get<double>());
    return true;
  }

 private:
  const std::string& text_;
  std::vector<ConfigIssue>& issues_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read config file " + path, {{0, "", "cannot read file"}});
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_issue(const std::string& file, const ConfigIssue& issue) {
  std::string out = file + ":" + std::to_string(issue.line) + ": ";
  if (!issue.key.empty()) out += issue.key + ": ";
  return out + issue.message;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Field RunConfig::initial_field() const {
  const Grid grid = make_grid(n_interior);
  return Field::modes(grid, initial);
}

RunConfig parse_config(const std::string& path) {
  RunConfig cfg;
  cfg.path = path;
  cfg.text = read_file(path);
  cfg.hash = fnv1a_hex(cfg.text);

  json root;
  try {
    root = json::parse(cfg.text);
  } catch (const json::parse_error& e) {
    ConfigIssue issue{line_at(cfg.text, e.byte == 0 ? 0 : e.byte - 1), "", e.what()};
    throw ConfigError(format_issue(path, issue), {issue});
  }
  std::vector<ConfigIssue> issues;
  Reader r(cfg.text, issues);
  if (!root.is_object()) {
    ConfigIssue issue{1, "", "top level must be a JSON object"};
    throw ConfigError(format_issue(path, issue), {issue});
  }
  r.check_keys(root, "",
               {"experiment", "seed", "output_dir", "model", "grid", "time", "noise", "g", "initial",
                "monitor", "control", "rate", "mc", "uniform", "decompose", "kernel_check"});

  if (!r.string(&root, "", "experiment", cfg.experiment)) {
    if (!root.contains("experiment")) r.issue("experiment", "missing required key");
  }
  r.integer(&root, "", "seed", cfg.seed);
  r.string(&root, "", "output_dir", cfg.output_dir);

  const bool needs_model = cfg.experiment != "kernel-check";
  const json* model = r.block(root, "model", {"nu", "alpha", "beta", "gamma", "delta", "epsilon"});
  if (!r.number(model, "model", "nu", cfg.model.nu) && needs_model) {
    r.issue(model ? "model.nu" : "model", "missing required key nu");
  }
  r.number(model, "model", "alpha", cfg.model.alpha);
  r.number(model, "model", "beta", cfg.model.beta);
  r.number(model, "model", "gamma", cfg.model.gamma);
  r.integer(model, "model", "delta", cfg.model.delta);
  r.number(model, "model", "epsilon", cfg.model.epsilon);

  const json* grid = r.block(root, "grid", {"n_interior"});
  if (!r.integer(grid, "grid", "n_interior", cfg.n_interior) && needs_model) {
    r.issue(grid ? "grid.n_interior" : "grid", "missing required key n_interior");
  }
  const json* time = r.block(root, "time", {"T", "dt", "save_stride"});
  if (!r.number(time, "time", "T", cfg.T) && needs_model) r.issue(time ? "time.T" : "time", "missing required key T");
  if (!r.number(time, "time", "dt", cfg.dt) && needs_model) r.issue(time ? "time.dt" : "time", "missing required key dt");
  r.integer(time, "time", "save_stride", cfg.save_stride);

  const json* noise = r.block(root, "noise", {"regime", "eta", "modes", "weights"});
  std::string regime = "white";
  r.string(noise, "noise", "regime", regime);
  if (regime == "colored") {
    cfg.noise.regime = NoiseRegime::ColoredQ;
  } else if (regime == "white") {
    cfg.noise.regime = NoiseRegime::SpaceTimeWhite;
  } else {
    r.issue("noise.regime", "expected \"colored\" or \"white\"");
  }
  r.number(noise, "noise", "eta", cfg.noise.eta);
  r.integer(noise, "noise", "modes", cfg.noise.modes);
  r.numbers(noise, "noise", "weights", cfg.noise.weights);
  if (!cfg.noise.weights.empty() && cfg.noise.modes == 0) {
    cfg.noise.modes = static_cast<int>(cfg.noise.weights.size());
  }
  cfg.noise.seed = cfg.seed;

  const json* g = r.block(root, "g", {"family", "K", "L"});
  std::string family = "constant";
  r.string(g, "g", "family", family);
  if (family == "constant") {
    cfg.g.family = GFamily::Constant;
  } else if (family == "linear") {
    cfg.g.family = GFamily::Linear;
  } else if (family == "bounded_sigmoid") {
    cfg.g.family = GFamily::BoundedSigmoid;
  } else {
    r.issue("g.family", "expected \"constant\", \"linear\" or \"bounded_sigmoid\"");
  }
  cfg.g.K = 1.0;
  cfg.g.L = 0.0;
  r.number(g, "g", "K", cfg.g.K);
  if (cfg.g.family == GFamily::Linear) cfg.g.L = cfg.g.K;
  r.number(g, "g", "L", cfg.g.L);

  const json* initial = r.block(root, "initial", {"modes"});
  r.modes(initial, "initial", "modes", cfg.initial);

  const json* monitor = r.block(root, "monitor", {"p", "R", "truncation", "field_bound"});
  r.integer(monitor, "monitor", "p", cfg.monitor_p);
  r.optional_number(monitor, "monitor", "R", cfg.monitor_R);
  r.optional_number(monitor, "monitor", "truncation", cfg.truncation);
  r.optional_number(monitor, "monitor", "field_bound", cfg.field_bound);

  const json* control = r.block(root, "control", {"modes"});
  r.modes(control, "control", "modes", cfg.control);

  const json* rate =
      r.block(root, "rate", {"event", "target", "radius", "mu", "max_iter", "tol", "multiplier_updates"});
  r.string(rate, "rate", "event", cfg.rate.event);
  r.modes(rate, "rate", "target", cfg.rate.target);
  r.number(rate, "rate", "radius", cfg.rate.radius);
  r.numbers(rate, "rate", "mu", cfg.rate.optimizer.mu_schedule);
  r.integer(rate, "rate", "max_iter", cfg.rate.optimizer.max_iter);
  r.number(rate, "rate", "tol", cfg.rate.optimizer.tol);
  r.boolean(rate, "rate", "multiplier_updates", cfg.rate.optimizer.multiplier_updates);

  const json* mc = r.block(root, "mc", {"event", "center", "radius", "norm", "p", "eps_ladder",
                                        "samples", "rate_reference"});
  r.string(mc, "mc", "event", cfg.mc.event);
  r.modes(mc, "mc", "center", cfg.mc.center);
  r.number(mc, "mc", "radius", cfg.mc.radius);
  r.string(mc, "mc", "norm", cfg.mc.norm);
  r.number(mc, "mc", "p", cfg.mc.p);
  r.numbers(mc, "mc", "eps_ladder", cfg.mc.eps_ladder);
  r.integer(mc, "mc", "samples", cfg.mc.samples);
  r.boolean(mc, "mc", "rate_reference", cfg.mc.rate_reference);

  const json* uniform = r.block(root, "uniform", {"eps_ladder", "eta", "samples", "u0_count", "u0_bound",
                                                  "phi_count", "phi_bound", "threshold", "p"});
  r.numbers(uniform, "uniform", "eps_ladder", cfg.uniform.eps_ladder);
  r.number(uniform, "uniform", "eta", cfg.uniform.eta);
  r.integer(uniform, "uniform", "samples", cfg.uniform.samples);
  r.integer(uniform, "uniform", "u0_count", cfg.uniform.u0_count);
  r.number(uniform, "uniform", "u0_bound", cfg.uniform.u0_bound);
  r.integer(uniform, "uniform", "phi_count", cfg.uniform.phi_count);
  r.number(uniform, "uniform", "phi_bound", cfg.uniform.phi_bound);
  r.number(uniform, "uniform", "threshold", cfg.uniform.threshold);
  r.number(uniform, "uniform", "p", cfg.uniform.p);

  const json* decompose = r.block(root, "decompose", {"paths", "moment"});
  r.integer(decompose, "decompose", "paths", cfg.decompose.paths);
  r.number(decompose, "decompose", "moment", cfg.decompose.moment);

  const json* kernel = r.block(root, "kernel_check", {"nu"});
  r.number(kernel, "kernel_check", "nu", cfg.kernel_nu);

  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(),
              [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
    throw ConfigError(format_issue(path, issues.front()), issues);
  }
  return cfg;
}

ValidationReport validate(const RunConfig& cfg) {
  ValidationReport rep;
  auto violation = [&](const std::string& key, const std::string& msg) {
    rep.violations.push_back({locate(cfg.text, key), key, msg});
  };
  auto warning = [&](const std::string& key, const std::string& msg) {
    rep.warnings.push_back({locate(cfg.text, key), key, msg});
  };

  if (!kExperiments.count(cfg.experiment)) {
    violation("experiment", "unknown experiment \"" + cfg.experiment +
                                "\" (simulate, skeleton, rate, mc, uniform, kernel-check, decompose)");
    return rep;
  }
  if (cfg.experiment == "kernel-check") {
    const double nu = cfg.kernel_nu > 0.0 ? cfg.kernel_nu : cfg.model.nu;
    if (!(nu > 0.0)) violation("kernel_check.nu", "nu must be > 0");
    return rep;
  }

  const ModelParams& m = cfg.model;
  if (!(m.nu > 0.0)) violation("model.nu", "nu must be > 0");
  if (!(m.alpha >= 0.0)) violation("model.alpha", "alpha must be >= 0");
  if (!(m.beta >= 0.0)) violation("model.beta", "beta must be >= 0");
  if (!(m.gamma >= 1.0)) violation("model.gamma", "gamma must be >= 1");
  if (m.delta < 1) violation("model.delta", "delta must be an integer >= 1");
  if (!(m.epsilon >= 0.0 && m.epsilon <= 1.0)) violation("model.epsilon", "epsilon must lie in [0, 1]");

  const std::size_t n = cfg.n_interior;
  if (n < 3) violation("grid.n_interior", "degenerate grid: n_interior must be >= 3");
  if (!(cfg.T > 0.0)) violation("time.T", "T must be > 0");
  if (!(cfg.dt > 0.0)) violation("time.dt", "dt must be > 0");
  if (cfg.T > 0.0 && cfg.dt > 0.0) {
    const double ratio = cfg.T / cfg.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, std::round(ratio))) {
      violation("time.dt", "T must be an integer multiple of dt");
    }
  }
  if (cfg.save_stride < 1) violation("time.save_stride", "save_stride must be >= 1");

  auto check_modes = [&](const ModeList& modes, const std::string& key) {
    for (const auto& [j, a] : modes) {
      if (j < 1) violation(key, "mode index must be >= 1");
      if (n >= 3 && static_cast<std::size_t>(j) > n) violation(key, "aliasing: mode index exceeds n_interior");
      if (!std::isfinite(a)) violation(key, "amplitude must be finite");
    }
  };
  check_modes(cfg.initial, "initial.modes");
  check_modes(cfg.control, "control.modes");

  if (cfg.noise.regime == NoiseRegime::ColoredQ) {
    if (cfg.noise.weights.empty() && !(cfg.noise.eta > 0.25)) {
      violation("noise.eta",
                "trace condition violated: colored noise needs eta > 1/4 so that sum q_j^2 < inf");
    }
    for (double q : cfg.noise.weights) {
      if (!std::isfinite(q) || q < 0.0) violation("noise.weights", "weights must be finite and >= 0");
    }
    if (cfg.noise.modes < 0) violation("noise.modes", "modes must be >= 0");
    if (n >= 3 && static_cast<std::size_t>(cfg.noise.modes) > n) {
      violation("noise.modes", "aliasing: more noise modes than interior nodes");
    }
  }

  if (!std::isfinite(cfg.g.K) || cfg.g.K < 0.0) violation("g.K", "K must be finite and >= 0");
  if (cfg.g.family == GFamily::BoundedSigmoid) {
    if (!(cfg.g.K > 0.0)) violation("g.K", "bounded_sigmoid needs K > 0");
    if (!std::isfinite(cfg.g.L) || cfg.g.L < 0.0) violation("g.L", "L must be finite and >= 0");
  }

  const int p = cfg.effective_monitor_p();
  if (cfg.g.bounded()) {
    if (p < 2 * m.delta + 1) violation("monitor.p", "p >= 2δ+1 required in the bounded-g regime");
  } else if (p <= std::max(6, 2 * m.delta + 1)) {
    violation("monitor.p", "p > max{6,2δ+1} required");
  }
  if (cfg.monitor_R && !(*cfg.monitor_R > 0.0)) violation("monitor.R", "R must be > 0");
  if (cfg.truncation && !(*cfg.truncation > 0.0)) violation("monitor.truncation", "truncation radius must be > 0");

  if (m.alpha > 0.0 && n >= 3 && cfg.dt > 0.0) {
    double bound = 0.0;
    if (cfg.field_bound) {
      bound = *cfg.field_bound;
    } else if (rep.violations.empty()) {
      bound = cfg.initial_field().sup_norm();
    }
    const double courant = m.alpha * std::pow(bound, m.delta) * cfg.dt * (static_cast<double>(n) + 1.0);
    if (courant > 1.0) {
      warning(cfg.field_bound ? "monitor.field_bound" : "time.dt",
              "CFL: alpha * bound^delta * dt / h = " + std::to_string(courant) + " exceeds 1");
    }
  }

  auto check_ladder = [&](const std::vector<double>& ladder, const std::string& key) {
    if (ladder.empty()) violation(key, "eps ladder must not be empty");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (!(ladder[i] > 0.0 && ladder[i] <= 1.0)) violation(key, "eps values must lie in (0, 1]");
      if (i > 0 && !(ladder[i] < ladder[i - 1])) violation(key, "eps ladder must be strictly decreasing");
    }
  };

  const std::string& e = cfg.experiment;
  if (e == "rate") {
    if (cfg.rate.event != "endpoint" && cfg.rate.event != "ball") {
      violation("rate.event", "expected \"endpoint\" or \"ball\"");
    }
    if (cfg.rate.event == "ball" && !(cfg.rate.radius > 0.0)) violation("rate.radius", "radius must be > 0");
    check_modes(cfg.rate.target, "rate.target");
    if (cfg.rate.optimizer.mu_schedule.empty()) violation("rate.mu", "penalty schedule must not be empty");
    for (double mu : cfg.rate.optimizer.mu_schedule) {
      if (!(mu > 0.0)) violation("rate.mu", "penalties must be > 0");
    }
    if (cfg.rate.optimizer.max_iter < 1) violation("rate.max_iter", "max_iter must be >= 1");
    if (!(cfg.rate.optimizer.tol > 0.0)) violation("rate.tol", "tol must be > 0");
  }
  if (e == "mc") {
    if (cfg.mc.event != "ball" && cfg.mc.event != "tube") violation("mc.event", "expected \"ball\" or \"tube\"");
    if (!(cfg.mc.radius > 0.0)) violation("mc.radius", "event radius must be > 0");
    if (cfg.mc.norm != "l2" && cfg.mc.norm != "lp" && cfg.mc.norm != "sup") {
      violation("mc.norm", "expected \"l2\", \"lp\" or \"sup\"");
    }
    if (!(cfg.mc.p >= 1.0)) violation("mc.p", "p must be >= 1");
    check_modes(cfg.mc.center, "mc.center");
    check_ladder(cfg.mc.eps_ladder, "mc.eps_ladder");
    if (cfg.mc.samples < 100) violation("mc.samples", "at least 100 samples required");
  }
  if (e == "uniform") {
    check_ladder(cfg.uniform.eps_ladder, "uniform.eps_ladder");
    if (!(cfg.uniform.eta > 0.0)) violation("uniform.eta", "eta must be > 0");
    if (cfg.uniform.samples < 1) violation("uniform.samples", "samples must be >= 1");
    if (cfg.uniform.u0_count < 1) violation("uniform.u0_count", "u0_count must be >= 1");
    if (cfg.uniform.phi_count < 1) violation("uniform.phi_count", "phi_count must be >= 1");
    if (!(cfg.uniform.u0_bound > 0.0)) violation("uniform.u0_bound", "u0_bound must be > 0");
    if (!(cfg.uniform.phi_bound >= 0.0)) violation("uniform.phi_bound", "phi_bound must be >= 0");
    if (!(cfg.uniform.p >= 1.0)) violation("uniform.p", "p must be >= 1");
    if (cfg.g.bounded() && cfg.uniform.p < 2 * m.delta + 1) {
      violation("uniform.p", "p >= 2δ+1 required in the bounded-g regime");
    }
  }
  if (e == "decompose") {
    if (!cfg.g.bounded()) violation("g.family", "decomposition needs a bounded g (constant or bounded_sigmoid)");
    if (cfg.decompose.paths < 1) violation("decompose.paths", "paths must be >= 1");
    if (!(cfg.decompose.moment >= 1.0)) violation("decompose.moment", "moment must be >= 1");
  }
  std::stable_sort(rep.violations.begin(), rep.violations.end(),
            [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
  return rep;
}

ValidationReport validate_file(const std::string& path) {
  try {
    return validate(parse_config(path));
  } catch (const ConfigError& e) {
    ValidationReport rep;
    rep.violations = e.issues();
    return rep;
  }
}

}  // namespace sgbh
