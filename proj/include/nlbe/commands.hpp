#pragma once

// The four workflows behind the command line. Each returns an exit code (0 iff every
// enabled check passed) and writes its files through a single RunWriter.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlbe/config.hpp"
#include "nlbe/diagnostics.hpp"
#include "nlbe/io.hpp"
#include "nlbe/moments.hpp"
#include "nlbe/operators.hpp"
#include "nlbe/particle.hpp"
#include "nlbe/solver.hpp"

namespace nlbe {

struct CommandResult {
  int exit_code = 0;
  DiagnosticsReport report;
  std::vector<std::string> notes;
};

inline std::vector<double> log_samples(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = hi;
    return v;
  }
  for (std::size_t i = 0; i < count; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  v.back() = hi;
  return v;
}

inline nlohmann::ordered_json config_summary(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["kernel"] = {{"family", std::string(kernel_label(c.kernel.family))},
                 {"ell", c.kernel.params.ell},
                 {"A0", c.kernel.A0},
                 {"regime", std::string(regime_name(classify_regime(c.kernel.params.ell)))}};
  j["daughter"] = {{"family", std::string(daughter_name(c.daughter.family))},
                   {"nu", c.daughter.options.nu},
                   {"p", c.daughter.options.p}};
  j["weight"] = {{"family", std::string(weight_name(c.weight.family))},
                 {"alpha", c.weight.params.alpha}};
  j["grid"] = {{"x_min", c.grid.x_min}, {"n", c.grid.n}, {"cells", c.grid.cells}};
  return j;
}

// ---------------------------------------------------------------- validate

inline CommandResult cmd_validate(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  CommandResult res;
  auto& rep = res.report;
  const auto kernel = cfg.kernel_spec();
  const auto b = cfg.daughter_spec();
  const auto g = cfg.weight_function();
  const double n = cfg.grid.n;
  const auto ys = log_samples(cfg.grid.x_min, n, cfg.diagnostics.samples);
  const auto zs = ys;

  const auto growth = verify_growth_bound(kernel, 1000);
  rep.add({"kernel_growth_bound", "omega(x) <= A1 x^ell on (0, 1)", growth.holds,
           growth.worst_ratio, 1.0, 1e-10, ""});

  const auto lmc = check_lmc(b, ys, zs, 1e-8);
  rep.add({"daughter_lmc", "int_0^y x b dx = y", lmc.passed, lmc.worst, 0.0, 1e-8, lmc.detail});
  const auto nop = check_nop(b, ys, zs);
  rep.add({"daughter_fragment_count", "int_0^y b dx <= beta0", nop.passed, nop.worst, b.beta0(),
           1e-12, ""});
  const auto pc = check_p_condition(b, b.p(), ys, zs);
  rep.add({"daughter_p_condition", "2 y^{p-1} int_0^y b^p dx <= Bp", pc.passed, pc.Bp_observed,
           pc.Bp_bound, 1e-10, pc.verifiable ? pc.detail : "unverifiable: " + pc.detail});

  const bool alpha_ok = g.alpha() > 1.0;
  rep.add({"weight_alpha", "alpha > 1", alpha_ok, g.alpha(), 1.0, 0.0, ""});
  const auto mono_samples = log_samples(1e-6, n, 400);
  const bool mono = check_ratio_monotone(g, mono_samples);
  rep.add({"weight_ratio_monotone", "g(x)/x non-decreasing on (0, n]", mono, 0.0, 0.0, 1e-10, ""});

  const auto theta_ys = default_theta_grid(n);
  const double z1[] = {1.0};
  const auto est = estimate_theta(g, b, theta_ys, z1);
  Check theta{"weight_dissipativity", "inf_y 1 - int g b / g(y) > 0", est.member, est.theta_hat,
              0.0, 0.0, ""};
  const bool closed = g.family() == WeightFamily::Power &&
                      (b.family() == DaughterFamily::PowerLaw ||
                       b.family() == DaughterFamily::UniformBinary);
  if (closed) {
    const double ref = closed_form_theta(g.alpha(), b.family() == DaughterFamily::PowerLaw ? b.nu() : 0.0);
    theta.property = "numerical theta matches (alpha-1)/(nu+alpha+1)";
    theta.bound = ref;
    theta.tolerance = 1e-6;
    theta.passed = est.member && std::abs(est.theta_hat - ref) <= 1e-6;
    std::ostringstream note;
    note << "ratio spread over y: " << format_double(est.ratio_max - est.ratio_min);
    theta.note = note.str();
  }
  rep.add(theta);

  const bool all = rep.all_passed();
  res.exit_code = all ? 0 : 1;

  RunWriter w(out_dir);
  nlohmann::ordered_json j;
  j["command"] = "validate";
  j["config"] = config_summary(cfg);
  j["regime"] = std::string(regime_name(kernel.regime()));
  j["A1"] = kernel.A1();
  j["beta0"] = b.beta0();
  j["Bp"] = b.Bp();
  j["theta"] = est.theta_hat;
  j["diagnostics"] = to_json(rep);
  w.write_json("validate_report.json", j);
  w.write_manifest("manifest.json", {{"command", "validate"}});
  return res;
}

// ---------------------------------------------------------------- solve

struct SolveOutcome {
  std::optional<Trajectory> trajectory;
  DiagnosticsReport report;
  std::string failure;  // stiffness / blow-up guard message
  double failure_time = 0.0;
};

/// Runs the solver and every trajectory diagnostic for `cfg`.
inline SolveOutcome run_solve(const RunConfig& cfg) {
  SolveOutcome out;
  const auto kernel = cfg.kernel_spec();
  const auto b = cfg.daughter_spec();
  const auto grid = cfg.grid_spec();
  const auto f_in = cfg.initial.build();
  const auto ops = assemble_operators(kernel, b, grid, {cfg.z_resolved});
  const auto proj = project_initial(f_in, grid);
  try {
    out.trajectory = solve(proj.state, ops, grid, cfg.solver, false);
  } catch (const StiffnessFailure& e) {
    out.failure = e.what();
    out.failure_time = e.last_state().t;
    out.report.add({"integration_completed", "integration reached t_end", false,
                    e.last_state().t, cfg.solver.t_end, 0.0, e.what()});
    return out;
  }
  const auto& tr = *out.trajectory;
  auto& rep = out.report;
  rep.add({"integration_completed", "integration reached t_end", true, tr.checkpoints.back().t,
           cfg.solver.t_end, 0.0, ""});
  rep.add(check_mass_conservation(tr));
  rep.add(check_nonnegativity(tr));
  rep.add(check_convexity_decay(tr));

  const auto g = cfg.weight_spec();
  rep.merge(check_weighted_moment_bounds(tr, g, kernel));
  rep.merge(tail_checks(tr, g, kernel, cfg.diagnostics.m_cut));
  rep.add(check_zeroth_moment_envelope(tr, kernel, b, g, cfg.diagnostics.riccati_fraction));
  if (m0_closed_form_applicable(kernel, b))
    rep.add(check_m0_law(tr, f_in.mass(grid.n()), b.beta0(), 0.01, 0.1 * cfg.solver.t_end,
                         cfg.solver.t_end));

  const double wf_mass = weak_form_residual(tr, TestFunction::identity(), kernel, b);
  rep.add({"weak_form_mass", "weak form with psi = x", wf_mass <= 1e-10, wf_mass, 1e-10, 1e-10, ""});
  const double wf_one = weak_form_residual(tr, TestFunction::constant(), kernel, b);
  rep.add({"weak_form_number", "weak form with psi = 1", wf_one <= 1e-2, wf_one, 1e-2, 1e-2, ""});
  const double wf_ind = weak_form_residual(tr, TestFunction::indicator(0.0, 1.0), kernel, b);
  rep.add({"weak_form_indicator", "weak form with psi = 1_(0,1)", wf_ind <= 2e-2, wf_ind, 2e-2,
           2e-2, ""});

  const double C_ui = ui_growth_constant(tr, cfg.diagnostics.ui_a_cut, cfg.diagnostics.ui_deltas,
                                         b.p());
  rep.add({"uniform_integrability", "W(t) <= W(0) + C delta^{(p-1)/p}, C finite",
           std::isfinite(C_ui), C_ui, std::numeric_limits<double>::infinity(), 0.0, ""});
  const double lip = lipschitz_quotient(tr);
  rep.add({"time_lipschitz", "||u(t)-u(s)||_1 / |t-s| bounded", std::isfinite(lip), lip,
           std::numeric_limits<double>::infinity(), 0.0, ""});
  return out;
}

inline std::string plot_series(const std::vector<double>& t, const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += format_double(t[i]) + " " + format_double(v[i]) + "\n";
  return s;
}

inline CommandResult cmd_solve(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  CommandResult res;
  auto outcome = run_solve(cfg);
  res.report = outcome.report;
  res.exit_code = res.report.all_passed() ? 0 : 1;

  RunWriter w(out_dir);
  nlohmann::ordered_json j;
  j["command"] = "solve";
  j["config"] = config_summary(cfg);
  if (outcome.trajectory) {
    const auto& tr = *outcome.trajectory;
    const auto& xb = tr.grid.pivots();
    const auto kernel = cfg.kernel_spec();
    const auto b = cfg.daughter_spec();
    const auto g = cfg.weight_spec();

    CsvBuilder traj({"t", "cell_index", "pivot", "count"});
    for (const auto& s : tr.checkpoints)
      for (std::size_t i = 0; i < xb.size(); ++i)
        traj.row({s.t, static_cast<double>(i), xb[i], s.counts[i]});
    w.write("trajectory.csv", traj.str());

    const auto& s0 = tr.checkpoints.front();
    const double M0_0 = moment(tr.grid, s0, 0.0);
    const double C0 = weighted_moment(tr.grid, s0, g);
    const double Theta = moment(tr.grid, s0, 1.0);
    const double A = envelope_constant(kernel, b);
    const bool super = kernel.regime() == Regime::SuperLinear;
    std::vector<double> t, m0, m1, m2, mg, env;
    CsvBuilder mom({"t", "M0", "M1", "M2", "Mg", "M0_envelope", "Mg_bound"});
    for (const auto& s : tr.checkpoints) {
      t.push_back(s.t);
      m0.push_back(moment(tr.grid, s, 0.0));
      m1.push_back(moment(tr.grid, s, 1.0));
      m2.push_back(moment(tr.grid, s, 2.0));
      mg.push_back(weighted_moment(tr.grid, s, g));
      env.push_back(super ? gronwall_bound(M0_0, C0, g.theta(), g(1.0), A, Theta, s.t)
                          : riccati_bound(M0_0, C0, g.theta(), g(1.0), A, s.t));
      mom.row({s.t, m0.back(), m1.back(), m2.back(), mg.back(), env.back(), C0 / g.theta()});
    }
    w.write("moments.csv", mom.str());
    w.write("plot_M0.dat", plot_series(t, m0));
    w.write("plot_M1.dat", plot_series(t, m1));
    w.write("plot_M2.dat", plot_series(t, m2));
    w.write("plot_Mg.dat", plot_series(t, mg));
    w.write("plot_M0_envelope.dat", plot_series(t, env));
    w.write("plot.gp",
            "# gnuplot script for the solve outputs in this directory\n"
            "set terminal pngcairo size 1200,800\n"
            "set output 'moments.png'\n"
            "set multiplot layout 2,2\n"
            "set xlabel 't'\n"
            "set title 'M0 and envelope'\n"
            "plot 'plot_M0.dat' w l t 'M0', 'plot_M0_envelope.dat' w l t 'envelope'\n"
            "set title 'M1'\n"
            "plot 'plot_M1.dat' w l t 'M1'\n"
            "set title 'M2'\n"
            "plot 'plot_M2.dat' w l t 'M2'\n"
            "set title 'weighted moment'\n"
            "plot 'plot_Mg.dat' w l t 'Mg'\n"
            "unset multiplot\n");

    j["stats"] = {{"accepted_steps", tr.stats.accepted_steps},
                  {"rejected_steps", tr.stats.rejected_steps},
                  {"rhs_evaluations", tr.stats.rhs_evaluations},
                  {"clip_events", tr.stats.clip_events},
                  {"clipped_mass", tr.stats.clipped_mass},
                  {"dt_smallest", tr.stats.dt_smallest},
                  {"dt_largest", tr.stats.dt_largest},
                  {"valid", tr.stats.valid}};
    j["constants"] = {{"M0_0", M0_0}, {"M1_0", Theta}, {"C0", C0}, {"theta", g.theta()},
                      {"A", A},       {"A1", kernel.A1()}, {"beta0", b.beta0()}};
  } else {
    j["failure"] = outcome.failure;
    j["failure_time"] = outcome.failure_time;
  }
  j["diagnostics"] = to_json(res.report);
  w.write_json("report.json", j);
  w.write_manifest("manifest.json", {{"command", "solve"}, {"seed", cfg.seed}});
  return res;
}

// ---------------------------------------------------------------- mc

/// (t, M0) pairs from a moments.csv written by cmd_solve.
inline std::vector<std::pair<double, double>> read_solve_m0(const std::filesystem::path& file) {
  std::vector<std::pair<double, double>> rows;
  std::istringstream in(read_file(file));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    rows.emplace_back(std::stod(a), std::stod(b));
  }
  return rows;
}

inline CommandResult cmd_mc(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  CommandResult res;
  const auto kernel = cfg.kernel_spec();
  const auto b = cfg.daughter_spec();
  if (!b.samplable())
    throw UnsupportedOperation("mc: daughter " + std::string(daughter_name(b.family())) +
                               " has no exact finite-fragment sampler; only uniform_binary runs "
                               "in the particle oracle");
  auto mc = cfg.mc;
  mc.seed = cfg.seed;
  const auto stats = ensemble_stats(cfg.initial.build(), cfg.grid.n, kernel, b, mc);

  auto se = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  CsvBuilder csv({"t", "M0_mean", "M0_stderr", "M1_mean", "M2_mean", "M2_stderr"});
  for (const auto& r : stats.rows)
    csv.row_strings({format_double(r.t), format_double(r.M0_mean), se(r.M0_stderr),
                     format_double(r.M1_mean), format_double(r.M2_mean), se(r.M2_stderr)});

  auto& rep = res.report;
  bool m1_exact = true;
  for (const auto& r : stats.rows)
    if (r.M1_stderr && *r.M1_stderr != 0.0) m1_exact = false;
  rep.add({"mc_mass_exact", "M1 standard error is exactly 0", m1_exact, 0.0, 0.0, 0.0, ""});
  rep.add({"mc_completed", "no replica hit the event cap", stats.aborted_replicas == 0,
           static_cast<double>(stats.aborted_replicas), 0.0, 0.0, ""});

  RunWriter w(out_dir);
  w.write("mc_stats.csv", csv.str());

  const auto solve_file = out_dir / "moments.csv";
  nlohmann::ordered_json cmp;
  if (std::filesystem::exists(solve_file)) {
    const auto pde = read_solve_m0(solve_file);
    double worst = 0.0;
    std::size_t matched = 0;
    bool ok = true;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : stats.rows) {
      auto it = std::find_if(pde.begin(), pde.end(), [&](const auto& p) {
        return std::abs(p.first - r.t) <= 1e-12 * std::max(1.0, r.t);
      });
      if (it == pde.end() || !r.M0_stderr) continue;
      ++matched;
      const double diff = std::abs(it->second - r.M0_mean);
      const double z = *r.M0_stderr > 0.0 ? diff / *r.M0_stderr
                                          : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      worst = std::max(worst, z);
      const bool pass = diff <= 3.0 * *r.M0_stderr;
      ok = ok && pass;
      rows.push_back({{"t", r.t}, {"pde_M0", it->second}, {"mc_M0_mean", r.M0_mean},
                      {"mc_M0_stderr", *r.M0_stderr}, {"z", z}, {"pass", pass}});
    }
    ok = ok && matched > 0;
    cmp["status"] = ok ? "PASS" : "FAIL";
    cmp["criterion"] = "|PDE M0 - MC mean| <= 3 stderr at every matched checkpoint";
    cmp["matched_checkpoints"] = matched;
    cmp["worst_z"] = worst;
    cmp["rows"] = rows;
    rep.add({"mc_pde_agreement", "|PDE M0 - MC mean| <= 3 stderr", ok, worst, 3.0, 0.0, ""});
    w.write_json("comparison.json", cmp);
  } else {
    res.notes.push_back("comparison skipped: no solve output (moments.csv) in " + out_dir.string());
  }

  nlohmann::ordered_json j;
  j["command"] = "mc";
  j["config"] = config_summary(cfg);
  j["particles"] = mc.particle_count;
  j["replicas"] = mc.replicas;
  j["total_events"] = stats.total_events;
  j["aborted_replicas"] = stats.aborted_replicas;
  j["absorbed_replicas"] = stats.absorbed_replicas;
  j["notes"] = res.notes;
  j["diagnostics"] = to_json(rep);
  w.write_json("mc_report.json", j);
  w.write_manifest("mc_manifest.json", {{"command", "mc"}, {"seed", cfg.seed}});
  res.exit_code = rep.all_passed() ? 0 : 1;
  return res;
}

// ---------------------------------------------------------------- sweep

struct SweepRow {
  double ell = 0.0;
  Regime regime = Regime::SuperLinear;
  bool completed = false;
  double t_reached = 0.0;
  double M0_final = 0.0;
  double curvature = 0.0;  // c2 T / c1 of a quadratic fit of M0(t)
  std::string growth;      // linear | superlinear | sublinear
  std::string envelope;
  bool envelope_passed = false;
  double envelope_observed = 0.0;
  double envelope_bound = 0.0;
  double mass_drift = 0.0;
  bool mass_conserved = false;
  std::string note;
};

/// Least-squares fit M0(t) ~ c0 + c1 t + c2 t^2; returns c2 T / c1.
inline double m0_curvature(const std::vector<double>& t, const std::vector<double>& y) {
  double S[5] = {0, 0, 0, 0, 0}, R[3] = {0, 0, 0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      S[k] += p;
      if (k < 3) R[k] += p * y[i];
      p *= t[i];
    }
  }
  // 3x3 normal equations by Cramer's rule
  const double a[3][3] = {{S[0], S[1], S[2]}, {S[1], S[2], S[3]}, {S[2], S[3], S[4]}};
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double D = det3(a);
  if (D == 0.0) return 0.0;
  double m1[3][3], m2[3][3];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      m1[r][c] = c == 1 ? R[r] : a[r][c];
      m2[r][c] = c == 2 ? R[r] : a[r][c];
    }
  const double c1 = det3(m1) / D;
  const double c2 = det3(m2) / D;
  if (c1 == 0.0) return 0.0;
  return c2 * t.back() / c1;
}

inline SweepRow sweep_entry(const RunConfig& base, double ell) {
  RunConfig cfg = base;
  cfg.kernel.params.ell = ell;
  SweepRow row;
  row.ell = ell;
  row.regime = classify_regime(ell);
  const auto outcome = run_solve(cfg);
  if (!outcome.trajectory) {
    row.t_reached = outcome.failure_time;
    row.note = "stopped by the stiffness guard: " + outcome.failure;
    row.growth = "unresolved";
    return row;
  }
  const auto& tr = *outcome.trajectory;
  row.completed = true;
  row.t_reached = tr.checkpoints.back().t;
  std::vector<double> t, m0;
  for (const auto& s : tr.checkpoints) {
    t.push_back(s.t);
    m0.push_back(moment(tr.grid, s, 0.0));
  }
  row.M0_final = m0.back();
  row.curvature = m0_curvature(t, m0);
  row.growth = std::abs(row.curvature) <= 1e-3 ? "linear"
               : row.curvature > 0.0          ? "superlinear"
                                              : "sublinear";
  for (const auto& c : outcome.report.checks) {
    if (c.name == "gronwall_envelope" || c.name == "riccati_envelope") {
      row.envelope = c.name;
      row.envelope_passed = c.passed;
      row.envelope_observed = c.observed;
      row.envelope_bound = c.bound;
    }
    if (c.name == "mass_conservation") {
      row.mass_conserved = c.passed;
      row.mass_drift = c.observed;
    }
  }
  return row;
}

inline CommandResult cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  CommandResult res;
  std::vector<SweepRow> rows(cfg.ell_values.size());
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), rows.size());
  std::vector<std::string> errors(rows.size());
  auto job = [&](std::size_t first) {
    for (std::size_t i = first; i < rows.size(); i += workers) {
      try {
        rows[i] = sweep_entry(cfg, cfg.ell_values[i]);
      } catch (const std::exception& e) {
        rows[i].ell = cfg.ell_values[i];
        rows[i].note = e.what();
        errors[i] = e.what();
      }
    }
  };
  if (workers <= 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(job, k);
    for (auto& th : pool) th.join();
  }

  CsvBuilder csv({"ell", "regime", "completed", "t_reached", "M0_final", "m0_curvature",
                  "m0_growth", "envelope", "envelope_pass", "mass_conserved", "note"});
  auto flag = [](bool v) { return std::string(v ? "PASS" : "FAIL"); };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    csv.row_strings({format_double(r.ell), std::string(regime_name(r.regime)),
                     r.completed ? "yes" : "no", format_double(r.t_reached),
                     format_double(r.M0_final), format_double(r.curvature), r.growth,
                     r.envelope.empty() ? "none" : r.envelope, flag(r.envelope_passed),
                     flag(r.mass_conserved), note});
    const std::string tag = "ell=" + format_double(r.ell);
    if (!errors[i].empty()) {
      res.report.add({"sweep_entry " + tag, "entry ran", false, 0.0, 0.0, 0.0, errors[i]});
      continue;
    }
    if (r.completed) {
      res.report.add({r.envelope + " " + tag, "zeroth-moment envelope", r.envelope_passed,
                      r.envelope_observed, r.envelope_bound, 0.0, ""});
      res.report.add({"mass_conservation " + tag, "first moment constant", r.mass_conserved,
                      r.mass_drift, 1e-10, 1e-10, ""});
    }
  }
  RunWriter w(out_dir);
  w.write("sweep.csv", csv.str());
  nlohmann::ordered_json j;
  j["command"] = "sweep";
  j["config"] = config_summary(cfg);
  j["diagnostics"] = to_json(res.report);
  w.write_json("sweep_report.json", j);
  w.write_manifest("manifest.json", {{"command", "sweep"}, {"seed", cfg.seed}});
  res.exit_code = res.report.all_passed() ? 0 : 1;
  return res;
}

inline CommandResult run_command(RunMode mode, const RunConfig& cfg,
                                 const std::filesystem::path& out_dir) {
  switch (mode) {
    case RunMode::Solve: return cmd_solve(cfg, out_dir);
    case RunMode::MonteCarlo: return cmd_mc(cfg, out_dir);
    case RunMode::Validate: return cmd_validate(cfg, out_dir);
    case RunMode::Sweep: return cmd_sweep(cfg, out_dir);
  }
  return {};
}

}  // namespace nlbe
