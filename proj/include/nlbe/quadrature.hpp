#pragma once

// Thin wrappers over Boost.Math adaptive quadrature. All callers integrate
// over finite intervals; singular endpoints go through tanh-sinh.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <sstream>

#include "nlbe/errors.hpp"

namespace nlbe::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15 point) for integrands that are smooth on [a, b].
/// The integrand is mapped onto [-1, 1] first: the library's adaptive recursion
/// reports its error estimate in reference-interval units.
template <class F>
Result smooth(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 20) {
  Result r;
  if (a == b) return r;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto mapped = [&](double s) { return half * f(mid + half * s); };
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      mapped, -1.0, 1.0, max_depth, rel_tol, &r.error, &l1);
  return r;
}

/// Tanh-sinh for integrands with integrable endpoint singularities (x^s, s > -1).
template <class F>
Result endpoint_singular(F&& f, double a, double b, double rel_tol = 1e-13) {
  Result r;
  if (a == b) return r;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double l1 = 0.0;
  std::size_t levels = 0;
  r.value = integrator.integrate(f, a, b, rel_tol, &r.error, &l1, &levels);
  return r;
}

/// Throws QuadratureFailure when the reported error exceeds `tol` relative to |value|
/// (absolute when value is tiny).
inline double require(const Result& r, double tol, const char* what) {
  const double scale = std::max(std::abs(r.value), 1e-300);
  if (!std::isfinite(r.value) || r.error > tol * scale + 1e-300) {
    std::ostringstream msg;
    msg << "quadrature did not converge for " << what << ": value=" << r.value
        << " error=" << r.error;
    throw QuadratureFailure(msg.str());
  }
  return r.value;
}

}  // namespace nlbe::quad
