#pragma once

// YAML run configuration. Parsing collects every problem it finds, each with the
// dotted path of the offending key, before throwing a single ConfigError.
//
//   mode: solve | mc | validate | sweep        (the CLI subcommand wins)
//   seed: 42
//   kernel:     family (I..VIII), ell, beta, gamma, nu, mu, p, A0, A1, n
//   daughter:   family, nu, p, beta0, Bp
//   weight:     family, alpha, beta, lambda, gamma, theta
//   initial:    kind (exponential | indicator), amplitude, rate, lo, hi, height
//   grid:       x_min, n, cells
//   solver:     t_end, dt_init, dt_min, dt_max, rel_tol, abs_tol, clip_tol,
//               checkpoints, max_steps, z_resolved
//   mc:         particles, replicas, t_end, checkpoints, event_cap, threads
//   diagnostics: m_cut, ui_a_cut, ui_deltas, riccati_fraction, samples
//   sweep:      ell_values

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "nlbe/daughter.hpp"
#include "nlbe/errors.hpp"
#include "nlbe/grid.hpp"
#include "nlbe/kernel.hpp"
#include "nlbe/particle.hpp"
#include "nlbe/solver.hpp"
#include "nlbe/weight.hpp"

namespace nlbe {

enum class RunMode { Solve, MonteCarlo, Validate, Sweep };

inline std::string_view mode_name(RunMode m) {
  switch (m) {
    case RunMode::Solve: return "solve";
    case RunMode::MonteCarlo: return "mc";
    case RunMode::Validate: return "validate";
    case RunMode::Sweep: return "sweep";
  }
  return "?";
}

inline std::optional<RunMode> mode_from_name(std::string_view s) {
  for (auto m : {RunMode::Solve, RunMode::MonteCarlo, RunMode::Validate, RunMode::Sweep})
    if (mode_name(m) == s) return m;
  return std::nullopt;
}

struct KernelConfig {
  KernelFamily family = KernelFamily::PowerLaw;
  KernelParams params;
  double A0 = 1.0;
  std::optional<double> A1;
  std::optional<double> n;  // defaults to grid.n
};

struct DaughterConfig {
  DaughterFamily family = DaughterFamily::UniformBinary;
  DaughterSpec::Options options;
};

struct WeightConfig {
  WeightFamily family = WeightFamily::Power;
  WeightParams params;
  std::optional<double> theta;
};

struct InitialConfig {
  InitialDensity::Kind kind = InitialDensity::Kind::Exponential;
  double amplitude = 1.0;
  double rate = 1.0;
  double lo = 1.0;
  double hi = 2.0;
  double height = 1.0;

  InitialDensity build() const {
    if (kind == InitialDensity::Kind::Indicator) return InitialDensity::indicator(lo, hi, height);
    if (kind == InitialDensity::Kind::Zero) return InitialDensity::zero();
    return InitialDensity::exponential(amplitude, rate);
  }
};

struct GridConfig {
  double x_min = 1e-3;
  double n = 10.0;
  std::size_t cells = 120;
};

struct DiagnosticsConfig {
  double m_cut = 2.0;
  double ui_a_cut = 1.0;
  std::vector<double> ui_deltas{1e-3, 1e-2, 1e-1};
  double riccati_fraction = 0.8;
  std::size_t samples = 20;  // per axis of the validator (y, z) grid
};

struct RunConfig {
  RunMode mode = RunMode::Solve;
  std::uint64_t seed = 0;
  KernelConfig kernel;
  DaughterConfig daughter;
  WeightConfig weight;
  InitialConfig initial;
  GridConfig grid;
  SolverConfig solver;
  bool z_resolved = false;
  MCConfig mc;
  DiagnosticsConfig diagnostics;
  std::vector<double> ell_values{0.25, 0.5, 1.0};

  KernelSpec kernel_spec() const {
    return KernelSpec(kernel.family, kernel.params, kernel.A0, kernel.A1,
                      kernel.n ? kernel.n : std::optional<double>(grid.n));
  }
  DaughterSpec daughter_spec() const {
    auto opt = daughter.options;
    opt.size_bound = grid.n;
    return DaughterSpec(daughter.family, opt);
  }
  WeightFunction weight_function() const { return WeightFunction(weight.family, weight.params); }
  WeightSpec weight_spec() const {
    const auto g = weight_function();
    if (weight.theta) return WeightSpec(g, *weight.theta);
    return make_weight(g, daughter_spec(), grid.n);
  }
  GridSpec grid_spec() const { return GridSpec(grid.x_min, grid.n, grid.cells); }
};

namespace detail {

class ConfigReader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  /// Flags keys of `node` that are not in `allowed`.
  void allow(const YAML::Node& node, const std::string& path, std::set<std::string> allowed) {
    if (!node) return;
    if (!node.IsMap()) {
      error(path, "expected a mapping");
      return;
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) error(join(path, key), "unknown key");
    }
  }

  template <class T>
  void read(const YAML::Node& node, const std::string& path, const std::string& key, T& out) {
    if (!node || !node.IsMap() || !node[key]) return;
    try {
      out = node[key].as<T>();
    } catch (const YAML::Exception&) {
      error(join(path, key), "wrong type");
    }
  }

  template <class T>
  void read(const YAML::Node& node, const std::string& path, const std::string& key,
            std::optional<T>& out) {
    if (!node || !node.IsMap() || !node[key]) return;
    try {
      out = node[key].as<T>();
    } catch (const YAML::Exception&) {
      error(join(path, key), "wrong type");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

}  // namespace detail

/// Parses and validates a YAML document; throws ConfigError listing every problem.
/// `mode` overrides the document's own mode key.
inline RunConfig parse_config(const std::string& text, std::optional<RunMode> mode = std::nullopt) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: YAML syntax error: ") + e.what());
  }
  RunConfig c;
  detail::ConfigReader r;
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  r.allow(root, "", {"mode", "seed", "kernel", "daughter", "weight", "initial", "grid", "solver",
                     "mc", "diagnostics", "sweep"});

  std::string mode_key = "solve";
  r.read(root, "", "mode", mode_key);
  if (auto m = mode_from_name(mode_key))
    c.mode = *m;
  else
    r.error("mode", "must be one of solve, mc, validate, sweep");
  if (mode) c.mode = *mode;
  r.read(root, "", "seed", c.seed);

  // grid first: other sections default to its n
  const auto g = root["grid"];
  r.allow(g, "grid", {"x_min", "n", "cells"});
  r.read(g, "grid", "x_min", c.grid.x_min);
  r.read(g, "grid", "n", c.grid.n);
  r.read(g, "grid", "cells", c.grid.cells);
  if (!(c.grid.x_min > 0.0)) r.error("grid.x_min", "must be > 0");
  if (!(c.grid.n > c.grid.x_min)) r.error("grid.n", "must exceed grid.x_min");
  if (c.grid.cells < 1) r.error("grid.cells", "must be >= 1");

  const auto k = root["kernel"];
  r.allow(k, "kernel", {"family", "ell", "beta", "gamma", "nu", "mu", "p", "A0", "A1", "n"});
  std::string kfam = "I";
  r.read(k, "kernel", "family", kfam);
  if (auto f = kernel_family_from_label(kfam))
    c.kernel.family = *f;
  else
    r.error("kernel.family", "unknown family '" + kfam + "' (expected I..VIII)");
  r.read(k, "kernel", "ell", c.kernel.params.ell);
  r.read(k, "kernel", "beta", c.kernel.params.beta);
  r.read(k, "kernel", "gamma", c.kernel.params.gamma);
  r.read(k, "kernel", "nu", c.kernel.params.nu);
  r.read(k, "kernel", "mu", c.kernel.params.mu);
  r.read(k, "kernel", "p", c.kernel.params.p);
  r.read(k, "kernel", "A0", c.kernel.A0);
  r.read(k, "kernel", "A1", c.kernel.A1);
  r.read(k, "kernel", "n", c.kernel.n);
  if (c.kernel.n && *c.kernel.n != c.grid.n) {
    std::ostringstream msg;
    msg << "kernel.n (" << *c.kernel.n << ") must equal grid.n (" << c.grid.n << ")";
    r.error("kernel.n", msg.str());
  }

  const auto d = root["daughter"];
  r.allow(d, "daughter", {"family", "nu", "p", "beta0", "Bp"});
  std::string dfam = "uniform_binary";
  r.read(d, "daughter", "family", dfam);
  if (auto f = daughter_family_from_name(dfam))
    c.daughter.family = *f;
  else
    r.error("daughter.family", "unknown family '" + dfam + "'");
  r.read(d, "daughter", "nu", c.daughter.options.nu);
  r.read(d, "daughter", "p", c.daughter.options.p);
  r.read(d, "daughter", "beta0", c.daughter.options.beta0);
  r.read(d, "daughter", "Bp", c.daughter.options.Bp);

  const auto w = root["weight"];
  r.allow(w, "weight", {"family", "alpha", "beta", "lambda", "gamma", "theta"});
  std::string wfam = "power";
  r.read(w, "weight", "family", wfam);
  if (auto f = weight_family_from_name(wfam))
    c.weight.family = *f;
  else
    r.error("weight.family", "unknown family '" + wfam + "'");
  r.read(w, "weight", "alpha", c.weight.params.alpha);
  r.read(w, "weight", "beta", c.weight.params.beta);
  r.read(w, "weight", "lambda", c.weight.params.lambda);
  r.read(w, "weight", "gamma", c.weight.params.gamma);
  r.read(w, "weight", "theta", c.weight.theta);

  const auto in = root["initial"];
  r.allow(in, "initial", {"kind", "amplitude", "rate", "lo", "hi", "height"});
  std::string kind = "exponential";
  r.read(in, "initial", "kind", kind);
  if (kind == "exponential")
    c.initial.kind = InitialDensity::Kind::Exponential;
  else if (kind == "indicator")
    c.initial.kind = InitialDensity::Kind::Indicator;
  else
    r.error("initial.kind", "must be exponential or indicator");
  r.read(in, "initial", "amplitude", c.initial.amplitude);
  r.read(in, "initial", "rate", c.initial.rate);
  r.read(in, "initial", "lo", c.initial.lo);
  r.read(in, "initial", "hi", c.initial.hi);
  r.read(in, "initial", "height", c.initial.height);

  const auto s = root["solver"];
  r.allow(s, "solver", {"t_end", "dt_init", "dt_min", "dt_max", "rel_tol", "abs_tol", "clip_tol",
                        "checkpoints", "max_steps", "z_resolved"});
  r.read(s, "solver", "t_end", c.solver.t_end);
  r.read(s, "solver", "dt_init", c.solver.dt_init);
  r.read(s, "solver", "dt_min", c.solver.dt_min);
  r.read(s, "solver", "dt_max", c.solver.dt_max);
  r.read(s, "solver", "rel_tol", c.solver.rel_tol);
  r.read(s, "solver", "abs_tol", c.solver.abs_tol);
  r.read(s, "solver", "clip_tol", c.solver.clip_tol);
  r.read(s, "solver", "checkpoints", c.solver.checkpoint_times);
  r.read(s, "solver", "max_steps", c.solver.max_steps);
  r.read(s, "solver", "z_resolved", c.z_resolved);

  const auto m = root["mc"];
  r.allow(m, "mc", {"particles", "replicas", "t_end", "checkpoints", "event_cap", "threads"});
  c.mc.t_end = c.solver.t_end;
  r.read(m, "mc", "particles", c.mc.particle_count);
  r.read(m, "mc", "replicas", c.mc.replicas);
  r.read(m, "mc", "t_end", c.mc.t_end);
  r.read(m, "mc", "checkpoints", c.mc.checkpoint_times);
  r.read(m, "mc", "event_cap", c.mc.event_cap);
  r.read(m, "mc", "threads", c.mc.threads);

  const auto dg = root["diagnostics"];
  r.allow(dg, "diagnostics", {"m_cut", "ui_a_cut", "ui_deltas", "riccati_fraction", "samples"});
  r.read(dg, "diagnostics", "m_cut", c.diagnostics.m_cut);
  r.read(dg, "diagnostics", "ui_a_cut", c.diagnostics.ui_a_cut);
  r.read(dg, "diagnostics", "ui_deltas", c.diagnostics.ui_deltas);
  r.read(dg, "diagnostics", "riccati_fraction", c.diagnostics.riccati_fraction);
  r.read(dg, "diagnostics", "samples", c.diagnostics.samples);

  const auto sw = root["sweep"];
  r.allow(sw, "sweep", {"ell_values"});
  r.read(sw, "sweep", "ell_values", c.ell_values);

  // constraint checks on the assembled values; the catalog constructors own the rules
  auto attempt = [&](const std::string& path, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      r.error(path, e.what());
    }
  };
  const bool validate_mode = c.mode == RunMode::Validate;
  {
    attempt("kernel", [&] { (void)c.kernel_spec(); });
    attempt("daughter", [&] { (void)c.daughter_spec(); });
    attempt("weight", [&] { (void)c.weight_function(); });
    if (!validate_mode && !(c.weight.params.alpha > 1.0))
      r.error("weight.alpha", "must be > 1 for membership in the admissible weight class");
    else if (!validate_mode && r.errors.empty())
      attempt("weight", [&] { (void)c.weight_spec(); });
    if (c.weight.theta && !(*c.weight.theta > 0.0 && *c.weight.theta < 1.0))
      r.error("weight.theta", "must lie in (0, 1)");
    attempt("initial", [&] { (void)c.initial.build(); });
    attempt("solver", [&] { c.solver.validate(); });
    attempt("mc", [&] { c.mc.validate(); });
    if (!(c.diagnostics.m_cut > 1.0 && c.diagnostics.m_cut < c.grid.n))
      r.error("diagnostics.m_cut", "must lie in (1, grid.n)");
    if (!(c.diagnostics.ui_a_cut > 0.0)) r.error("diagnostics.ui_a_cut", "must be > 0");
    for (double dlt : c.diagnostics.ui_deltas)
      if (!(dlt > 0.0)) r.error("diagnostics.ui_deltas", "entries must be > 0");
    if (!(c.diagnostics.riccati_fraction > 0.0 && c.diagnostics.riccati_fraction < 1.0))
      r.error("diagnostics.riccati_fraction", "must lie in (0, 1)");
    if (c.diagnostics.samples < 1) r.error("diagnostics.samples", "must be >= 1");
    for (double l : c.ell_values)
      if (!(l > 0.0)) r.error("sweep.ell_values", "entries must be > 0");
  }

  if (!r.errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

inline RunConfig load_config(const std::string& path, std::optional<RunMode> mode = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), mode);
}

}  // namespace nlbe
