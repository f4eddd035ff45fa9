#pragma once

// Checks of trajectories against the identities and a-priori bounds satisfied by
// the truncated problem. Every time integral is a trapezoid over checkpoints.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlbe/daughter.hpp"
#include "nlbe/grid.hpp"
#include "nlbe/kernel.hpp"
#include "nlbe/moments.hpp"
#include "nlbe/solver.hpp"
#include "nlbe/weight.hpp"

namespace nlbe {

struct Check {
  std::string name;
  std::string property;  // what is being verified, in words
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct DiagnosticsReport {
  std::vector<Check> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  void add(Check c) { checks.push_back(std::move(c)); }
  void merge(const DiagnosticsReport& o) {
    checks.insert(checks.end(), o.checks.begin(), o.checks.end());
  }
};

inline nlohmann::ordered_json to_json(const Check& c) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  };
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["property"] = c.property;
  j["passed"] = c.passed;
  j["observed"] = num(c.observed);
  j["bound"] = num(c.bound);
  j["tolerance"] = num(c.tolerance);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline nlohmann::ordered_json to_json(const DiagnosticsReport& r) {
  nlohmann::ordered_json j;
  j["all_passed"] = r.all_passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  return j;
}

/// L_j = sum_k a(xbar_j, xbar_k) u_k straight from the kernel.
inline std::vector<double> kernel_rates(const GridSpec& grid, const StateVector& s,
                                        const KernelSpec& kernel) {
  const auto& xb = grid.pivots();
  const std::size_t C = xb.size();
  std::vector<double> L(C, 0.0);
  if (kernel.is_product()) {
    double S = 0.0;
    for (std::size_t k = 0; k < C; ++k) S += kernel.omega(xb[k]) * s.counts[k];
    for (std::size_t j = 0; j < C; ++j) L[j] = kernel.A0() * kernel.omega(xb[j]) * S;
  } else {
    for (std::size_t j = 0; j < C; ++j)
      for (std::size_t k = 0; k < C; ++k) L[j] += kernel(xb[j], xb[k]) * s.counts[k];
  }
  return L;
}

/// Trapezoid of samples over the checkpoint times, cumulative.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                                const std::vector<double>& y) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return out;
}

inline std::vector<double> checkpoint_times(const Trajectory& tr) {
  std::vector<double> t;
  for (const auto& s : tr.checkpoints) t.push_back(s.t);
  return t;
}

inline Check check_mass_conservation(const Trajectory& tr, double rel_tol = 1e-10) {
  Check c{"mass_conservation", "first moment constant in time", false, 0.0, rel_tol, rel_tol, {}};
  const double m1_0 = moment(tr.grid, tr.checkpoints.front(), 1.0);
  for (const auto& s : tr.checkpoints)
    c.observed = std::max(c.observed, std::abs(moment(tr.grid, s, 1.0) - m1_0) / m1_0);
  c.passed = c.observed <= rel_tol && tr.stats.clip_events == 0;
  if (tr.stats.clip_events) c.note = "clipping occurred; conservation not asserted";
  return c;
}

inline Check check_nonnegativity(const Trajectory& tr) {
  Check c{"nonnegativity", "counts stay >= -clip_tol", false, 0.0, -tr.stats.clip_tol, 0.0, {}};
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& s : tr.checkpoints)
    for (double u : s.counts) mn = std::min(mn, u);
  c.observed = mn;
  c.passed = mn >= -tr.stats.clip_tol && tr.stats.valid;
  if (!tr.stats.valid) c.note = "clipped mass above 1e-9 M1(0)";
  return c;
}

/// M2 (any convex weight, really) can only decrease under pure breakage.
inline Check check_convexity_decay(const Trajectory& tr, double abs_tol = 1e-12) {
  Check c{"m2_non_increasing", "second moment non-increasing", false, 0.0, 0.0, abs_tol, {}};
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < tr.checkpoints.size(); ++i)
    worst = std::max(worst, moment(tr.grid, tr.checkpoints[i], 2.0) -
                                moment(tr.grid, tr.checkpoints[i - 1], 2.0));
  c.observed = tr.checkpoints.size() > 1 ? worst : 0.0;
  c.passed = c.observed <= abs_tol;
  return c;
}

/// Weighted moment bound M_g(t) <= C0/theta and the time-integrated collision
/// functional int int int g(y) a(y, z) f f <= C0/theta, with C0 from the initial state.
inline DiagnosticsReport check_weighted_moment_bounds(const Trajectory& tr, const WeightSpec& g,
                                                      const KernelSpec& kernel) {
  DiagnosticsReport r;
  const double C0 = weighted_moment(tr.grid, tr.checkpoints.front(), g);
  const double bound = C0 / g.theta();
  Check a{"weighted_moment_bound", "M_g(t) <= C0/theta", false, 0.0, bound, 0.0, {}};
  Check b{"collision_functional_bound", "int_0^t g a f f <= C0/theta", false, 0.0, bound, 0.0, {}};
  std::vector<double> integrand;
  const auto& xb = tr.grid.pivots();
  for (const auto& s : tr.checkpoints) {
    a.observed = std::max(a.observed, weighted_moment(tr.grid, s, g));
    const auto L = kernel_rates(tr.grid, s, kernel);
    double acc = 0.0;
    for (std::size_t j = 0; j < xb.size(); ++j) acc += g(xb[j]) * s.counts[j] * L[j];
    integrand.push_back(acc);
  }
  b.observed = cumulative_trapezoid(checkpoint_times(tr), integrand).back();
  a.passed = a.observed <= bound;
  b.passed = b.observed <= bound;
  r.add(a);
  r.add(b);
  return r;
}

/// Tail estimates above m_cut (> 1): the weighted tail never exceeds its initial
/// value, its dissipation is controlled, and
///   int_0^t (sum_{x > m} omega u)^2 ds <= tail_0 / (theta g(m) A0).
inline DiagnosticsReport tail_checks(const Trajectory& tr, const WeightSpec& g,
                                     const KernelSpec& kernel, double m_cut) {
  if (!(m_cut > 1.0 && m_cut < tr.grid.n())) throw DomainError("tail_checks: m_cut must lie in (1, n)");
  DiagnosticsReport r;
  const auto& xb = tr.grid.pivots();
  auto tail_g = [&](const StateVector& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xb.size(); ++i)
      if (xb[i] > m_cut) acc += g(xb[i]) * s.counts[i];
    return acc;
  };
  const double tail0 = tail_g(tr.checkpoints.front());
  Check t1{"tail_weighted_moment", "int_m^n g f(t) <= int_m^n g f_in", true, 0.0, tail0,
           1e-12 * tail0, {}};
  std::vector<double> diss, sq;
  for (const auto& s : tr.checkpoints) {
    const double v = tail_g(s);
    t1.observed = std::max(t1.observed, v);
    const auto L = kernel_rates(tr.grid, s, kernel);
    double d = 0.0, w = 0.0;
    for (std::size_t i = 0; i < xb.size(); ++i) {
      if (xb[i] <= m_cut) continue;
      d += g(xb[i]) * s.counts[i] * L[i];
      w += kernel.omega(xb[i]) * s.counts[i];
    }
    diss.push_back(d);
    sq.push_back(w * w);
  }
  t1.passed = t1.observed <= tail0 + t1.tolerance;
  const auto times = checkpoint_times(tr);
  Check t2{"tail_dissipation", "theta int g a f f over y > m <= int_m^n g f_in", false,
           g.theta() * cumulative_trapezoid(times, diss).back(), tail0, 0.0, {}};
  t2.passed = t2.observed <= t2.bound;
  const double b3 = tail0 / (g.theta() * g(m_cut) * kernel.A0());
  Check t3{"tail_omega_square", "int (int_m^n omega f)^2 ds <= tail_0/(theta g(m))", false,
           cumulative_trapezoid(times, sq).back(), b3, 0.0, {}};
  t3.passed = t3.observed <= b3;
  r.add(t1);
  r.add(t2);
  r.add(t3);
  return r;
}

/// Zeroth-moment envelope: exponential (Gronwall) bound in the super-linear regime,
/// Riccati comparison bound up to `riccati_fraction` of its blow-up time otherwise.
inline Check check_zeroth_moment_envelope(const Trajectory& tr, const KernelSpec& kernel,
                                          const DaughterSpec& b, const WeightSpec& g,
                                          double riccati_fraction = 0.8) {
  const auto& s0 = tr.checkpoints.front();
  const double M0_0 = moment(tr.grid, s0, 0.0);
  const double C0 = weighted_moment(tr.grid, s0, g);
  const double Theta = moment(tr.grid, s0, 1.0);
  const double A = envelope_constant(kernel, b);
  const double g1 = g(1.0);
  Check c;
  c.passed = true;
  double worst_ratio = 0.0;
  if (kernel.regime() == Regime::SuperLinear) {
    c.name = "gronwall_envelope";
    c.property = "M0(t) <= (M0(0) + A C0/(theta g(1))) exp(A Theta t)";
    for (const auto& s : tr.checkpoints) {
      const double bound = gronwall_bound(M0_0, C0, g.theta(), g1, A, Theta, s.t);
      const double m0 = moment(tr.grid, s, 0.0);
      if (m0 / bound > worst_ratio) {
        worst_ratio = m0 / bound;
        c.observed = m0;
        c.bound = bound;
      }
      if (m0 > bound) c.passed = false;
    }
  } else {
    c.name = "riccati_envelope";
    c.property = "M0(t) <= y0/(1 - A y0 t) before the comparison blow-up";
    const double T_star = riccati_blowup_time(M0_0, C0, g.theta(), g1, A);
    std::size_t used = 0;
    for (const auto& s : tr.checkpoints) {
      if (s.t > riccati_fraction * T_star) continue;
      ++used;
      const double bound = riccati_bound(M0_0, C0, g.theta(), g1, A, s.t);
      const double m0 = moment(tr.grid, s, 0.0);
      if (m0 / bound > worst_ratio) {
        worst_ratio = m0 / bound;
        c.observed = m0;
        c.bound = bound;
      }
      if (m0 > bound) c.passed = false;
    }
    c.note = "blow-up time " + std::to_string(T_star) + ", checkpoints used " +
             std::to_string(used);
  }
  c.tolerance = 0.0;
  return c;
}

/// |M0(t) - M0(0) - (beta0 - 1) Theta^2 t| <= rel_tol (beta0 - 1) Theta^2 t on [t_lo, t_hi];
/// observed is the worst relative error.
inline Check check_m0_law(const Trajectory& tr, double Theta, double beta0, double rel_tol = 0.01,
                          double t_lo = 0.1, double t_hi = 1.0) {
  Check c{"m0_closed_form", "M0(t) - M0(0) = (beta0-1) Theta^2 t", false, 0.0, rel_tol, rel_tol, {}};
  const double M0_0 = moment(tr.grid, tr.checkpoints.front(), 0.0);
  std::size_t used = 0;
  for (const auto& s : tr.checkpoints) {
    if (s.t < t_lo - 1e-12 || s.t > t_hi + 1e-12) continue;
    ++used;
    const double pred = m0_closed_form_oracle(Theta, beta0, M0_0, s.t) - M0_0;
    const double err = std::abs(moment(tr.grid, s, 0.0) - M0_0 - pred) / pred;
    c.observed = std::max(c.observed, err);
  }
  c.passed = used > 0 && c.observed <= rel_tol;
  return c;
}

/// Bounded test functions for the weak form.
struct TestFunction {
  enum class Kind { Constant, Identity, Indicator };
  Kind kind = Kind::Constant;
  double value = 1.0;  // Constant
  double lo = 0.0;     // Indicator
  double hi = 1.0;

  static TestFunction constant(double c = 1.0) { return {Kind::Constant, c, 0.0, 0.0}; }
  static TestFunction identity() { return {Kind::Identity, 0.0, 0.0, 0.0}; }
  static TestFunction indicator(double lo, double hi) { return {Kind::Indicator, 0.0, lo, hi}; }

  double operator()(double x) const {
    switch (kind) {
      case Kind::Constant: return value;
      case Kind::Identity: return x;
      case Kind::Indicator: return (x > lo && x < hi) ? 1.0 : 0.0;
    }
    return 0.0;
  }

  /// int_0^y psi(x) b(x, y, z) dx - psi(y), exact.
  double tilde(const DaughterSpec& b, double y) const {
    switch (kind) {
      case Kind::Constant: return value * (b.partial_moment(0.0, 0.0, y, y) - 1.0);
      case Kind::Identity: return b.partial_moment(1.0, 0.0, y, y) - y;
      case Kind::Indicator: return b.partial_moment(0.0, lo, hi, y) - (*this)(y);
    }
    return 0.0;
  }
};

/// max over checkpoints of
///   |sum psi u(t) - sum psi u(0) - int_0^t sum_j psi~(xbar_j) u_j L_j ds| / sum |psi| u(0)
/// using the continuous daughter distribution at the pivots.
inline double weak_form_residual(const Trajectory& tr, const TestFunction& psi,
                                 const KernelSpec& kernel, const DaughterSpec& b) {
  const auto& xb = tr.grid.pivots();
  std::vector<double> psi_at(xb.size()), tilde_at(xb.size());
  for (std::size_t i = 0; i < xb.size(); ++i) {
    psi_at[i] = psi(xb[i]);
    tilde_at[i] = psi.tilde(b, xb[i]);
  }
  auto pairing = [&](const StateVector& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xb.size(); ++i) acc += psi_at[i] * s.counts[i];
    return acc;
  };
  std::vector<double> production;
  for (const auto& s : tr.checkpoints) {
    const auto L = kernel_rates(tr.grid, s, kernel);
    double acc = 0.0;
    for (std::size_t j = 0; j < xb.size(); ++j) acc += tilde_at[j] * s.counts[j] * L[j];
    production.push_back(acc);
  }
  const auto rhs_int = cumulative_trapezoid(checkpoint_times(tr), production);
  const auto& s0 = tr.checkpoints.front();
  double scale = 0.0;
  for (std::size_t i = 0; i < xb.size(); ++i) scale += std::abs(psi_at[i]) * s0.counts[i];
  const double p0 = pairing(s0);
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.checkpoints.size(); ++k)
    worst = std::max(worst, std::abs(pairing(tr.checkpoints[k]) - p0 - rhs_int[k]));
  return scale > 0.0 ? worst / scale : worst;
}

/// Largest number of particles in (0, a_cut) carried by a set of measure <= delta.
/// For a piecewise-constant density the greedy fill by decreasing density is exact.
inline double uniform_integrability_modulus(const GridSpec& grid, const StateVector& s,
                                            double a_cut, double delta) {
  if (!(delta > 0.0)) return 0.0;
  const auto& e = grid.edges();
  struct Piece {
    double density;
    double measure;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    if (e[i] >= a_cut) break;
    const double w = e[i + 1] - e[i];
    const double inside = std::min(e[i + 1], a_cut) - e[i];
    if (s.counts[i] > 0.0) pieces.push_back({s.counts[i] / w, inside});
  }
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const Piece& a, const Piece& b) { return a.density > b.density; });
  double budget = delta, acc = 0.0;
  for (const auto& p : pieces) {
    const double take = std::min(budget, p.measure);
    acc += p.density * take;
    budget -= take;
    if (budget <= 0.0) break;
  }
  return acc;
}

/// Smallest C with W(t) <= W(0) + C delta^{(p-1)/p} over all checkpoints and deltas.
inline double ui_growth_constant(const Trajectory& tr, double a_cut,
                                 const std::vector<double>& deltas, double p) {
  double C = 0.0;
  for (double d : deltas) {
    const double w0 = uniform_integrability_modulus(tr.grid, tr.checkpoints.front(), a_cut, d);
    for (const auto& s : tr.checkpoints) {
      const double w = uniform_integrability_modulus(tr.grid, s, a_cut, d);
      C = std::max(C, (w - w0) / std::pow(d, (p - 1.0) / p));
    }
  }
  return C;
}

/// max ||u(t_k) - u(t_{k-1})||_1 / (t_k - t_{k-1})
inline double lipschitz_quotient(const Trajectory& tr) {
  double q = 0.0;
  for (std::size_t k = 1; k < tr.checkpoints.size(); ++k) {
    const auto& a = tr.checkpoints[k - 1];
    const auto& b = tr.checkpoints[k];
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) continue;
    double d = 0.0;
    for (std::size_t i = 0; i < a.counts.size(); ++i) d += std::abs(b.counts[i] - a.counts[i]);
    q = std::max(q, d / dt);
  }
  return q;
}

}  // namespace nlbe
