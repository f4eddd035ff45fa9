#pragma once

// Discrete moments of sectional states and the closed-form comparison curves
// for the zeroth moment.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nlbe/daughter.hpp"
#include "nlbe/errors.hpp"
#include "nlbe/grid.hpp"
#include "nlbe/kernel.hpp"
#include "nlbe/solver.hpp"
#include "nlbe/weight.hpp"

namespace nlbe {

/// sum_i xbar_i^m u_i
inline double moment(const GridSpec& grid, const StateVector& s, double m) {
  const auto& xb = grid.pivots();
  double acc = 0.0;
  if (m == 0.0) {
    for (double c : s.counts) acc += c;
  } else if (m == 1.0) {
    for (std::size_t i = 0; i < xb.size(); ++i) acc += xb[i] * s.counts[i];
  } else {
    for (std::size_t i = 0; i < xb.size(); ++i) acc += std::pow(xb[i], m) * s.counts[i];
  }
  return acc;
}

/// sum_i g(xbar_i) u_i
template <class Weight>
double weighted_moment(const GridSpec& grid, const StateVector& s, const Weight& g) {
  const auto& xb = grid.pivots();
  double acc = 0.0;
  for (std::size_t i = 0; i < xb.size(); ++i)
    if (s.counts[i] != 0.0) acc += g(xb[i]) * s.counts[i];
  return acc;
}

struct MomentSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string descriptor;  // "M0", "M1", "Mg:power(2)", ...
};

inline MomentSeries moment_series(const Trajectory& tr, double m) {
  MomentSeries ms;
  ms.descriptor = "M" + std::to_string(m);
  for (const auto& s : tr.checkpoints) {
    ms.times.push_back(s.t);
    ms.values.push_back(moment(tr.grid, s, m));
  }
  return ms;
}

template <class Weight>
MomentSeries weighted_series(const Trajectory& tr, const Weight& g, std::string name) {
  MomentSeries ms;
  ms.descriptor = std::move(name);
  for (const auto& s : tr.checkpoints) {
    ms.times.push_back(s.t);
    ms.values.push_back(weighted_moment(tr.grid, s, g));
  }
  return ms;
}

/// The zeroth-moment law closes when a(x, y) = x y and every breakage produces
/// exactly beta0 fragments: dM0/dt = (beta0 - 1) (int x f)^2 = (beta0 - 1) Theta^2.
inline bool m0_closed_form_applicable(const KernelSpec& k, const DaughterSpec& b) {
  return k.family() == KernelFamily::PowerLaw && k.ell() == 1.0 && k.A0() == 1.0 &&
         b.constant_fragment_count();
}

inline double m0_closed_form_oracle(double theta_mass, double beta0, double M0_init, double t) {
  return M0_init + (beta0 - 1.0) * theta_mass * theta_mass * t;
}

inline double m0_closed_form_oracle(const KernelSpec& k, const DaughterSpec& b,
                                    double theta_mass, double M0_init, double t) {
  if (!m0_closed_form_applicable(k, b))
    throw UnsupportedOperation("m0 closed form needs kernel I with ell = 1, A0 = 1");
  return m0_closed_form_oracle(theta_mass, b.beta0(), M0_init, t);
}

/// Explicit constant A in the zeroth-moment inequality
///   M0(t) <= M0(0) + A int_0^t J M0 ds + A C0 / (theta g(1)),
/// from a <= 2 A0 (omega_0-part^2 + omega_inf-part^2), omega_0 <= A1 x^l, and the
/// tail bound with m = 1.
inline double envelope_constant(const KernelSpec& k, const DaughterSpec& b) {
  return 2.0 * (b.beta0() - 1.0) * std::max(k.A0() * k.A1() * k.A1(), 1.0);
}

/// Comparison solution y0 / (1 - A y0 t) of y' = A y^2 with
/// y0 = M0(0) + A C0 / (theta g(1)); +inf at and beyond the blow-up time.
inline double riccati_bound(double M0_init, double C0, double theta, double g1, double A,
                            double t) {
  const double y0 = M0_init + A * C0 / (theta * g1);
  const double d = 1.0 - A * y0 * t;
  if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
  return y0 / d;
}

inline double riccati_blowup_time(double M0_init, double C0, double theta, double g1, double A) {
  const double y0 = M0_init + A * C0 / (theta * g1);
  return 1.0 / (A * y0);
}

/// (M0(0) + A C0 / (theta g(1))) exp(A Theta T)
inline double gronwall_bound(double M0_init, double C0, double theta, double g1, double A,
                             double Theta, double T) {
  return (M0_init + A * C0 / (theta * g1)) * std::exp(A * Theta * T);
}

}  // namespace nlbe
