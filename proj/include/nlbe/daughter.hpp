#pragma once

// Daughter distributions b(x, y, z): density of fragments of size x produced when a
// particle of size y breaks after colliding with a particle of size z.
//
// Every catalog family is independent of z; z is kept in all signatures. The
// uniform-binary and both KLL families are piecewise constant in x, which lets all
// x-integrals against them be done exactly segment by segment.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlbe/errors.hpp"
#include "nlbe/quadrature.hpp"

namespace nlbe {

enum class DaughterFamily { PowerLaw, UniformBinary, KLLUnitEnds, KLLShrinkingEnds };

inline std::string_view daughter_name(DaughterFamily f) {
  switch (f) {
    case DaughterFamily::PowerLaw: return "power_law";
    case DaughterFamily::UniformBinary: return "uniform_binary";
    case DaughterFamily::KLLUnitEnds: return "kll_unit_ends";
    case DaughterFamily::KLLShrinkingEnds: return "kll_shrinking_ends";
  }
  return "?";
}

inline std::optional<DaughterFamily> daughter_family_from_name(std::string_view s) {
  for (auto f : {DaughterFamily::PowerLaw, DaughterFamily::UniformBinary,
                 DaughterFamily::KLLUnitEnds, DaughterFamily::KLLShrinkingEnds})
    if (daughter_name(f) == s) return f;
  return std::nullopt;
}

/// Constant piece of a piecewise-constant density on [lo, hi].
struct Segment {
  double lo;
  double hi;
  double value;
};

class DaughterSpec {
 public:
  struct Options {
    double nu = 0.0;                      // PowerLaw exponent, in (-1, 0]
    double p = 1.5;                       // exponent of the L^p structural condition
    double size_bound = std::numeric_limits<double>::infinity();  // y range for derived Bp
    std::optional<double> beta0;          // override; must not undercut the sharp value
    std::optional<double> Bp;             // override
  };

  explicit DaughterSpec(DaughterFamily family) : DaughterSpec(family, Options{}) {}

  DaughterSpec(DaughterFamily family, Options opt)
      : family_(family), nu_(opt.nu), p_(opt.p), size_bound_(opt.size_bound) {
    std::ostringstream err;
    if (family_ == DaughterFamily::PowerLaw && !(nu_ > -1.0 && nu_ <= 0.0))
      err << "nu must lie in (-1, 0]; ";
    if (!(p_ > 1.0 && p_ < 2.0)) err << "p must lie in (1, 2); ";
    if (!(size_bound_ > 0.0)) err << "size_bound must be > 0; ";
    if (!err.str().empty())
      throw DomainError("daughter " + std::string(daughter_name(family_)) + ": " + err.str());

    beta0_ = sharp_fragment_count();
    if (opt.beta0) {
      if (!(*opt.beta0 >= 2.0 && *opt.beta0 >= beta0_))
        throw DomainError("daughter: beta0 override must be >= 2 and >= the sharp count");
      beta0_ = *opt.beta0;
    }
    Bp_ = opt.Bp ? *opt.Bp : derived_Bp(p_);
    if (!(Bp_ > 0.0)) throw DomainError("daughter: Bp must be > 0");
  }

  DaughterFamily family() const { return family_; }
  double nu() const { return nu_; }
  double p() const { return p_; }
  double Bp() const { return Bp_; }
  double beta0() const { return beta0_; }
  double size_bound() const { return size_bound_; }
  bool samplable() const { return family_ == DaughterFamily::UniformBinary; }
  bool z_independent() const { return true; }
  /// Every catalog family produces the same number of fragments for every (y, z).
  bool constant_fragment_count() const { return true; }

  double operator()(double x, double y, double z) const {
    if (!(x > 0.0) || !(y > 0.0) || !(z > 0.0))
      throw DomainError("eval_b: arguments must be > 0");
    if (x > y) return 0.0;
    if (family_ == DaughterFamily::PowerLaw)
      return (nu_ + 2.0) / std::pow(y, nu_ + 1.0) * std::pow(x, nu_);
    for (const auto& s : segments(y))
      if (x >= s.lo && x <= s.hi) return s.value;
    return 0.0;
  }

  /// Pieces of b(., y, z) for the piecewise-constant families; empty for PowerLaw.
  std::vector<Segment> segments(double y) const {
    switch (family_) {
      case DaughterFamily::PowerLaw:
        return {};
      case DaughterFamily::UniformBinary:
        return {{0.0, y, 2.0 / y}};
      case DaughterFamily::KLLUnitEnds:
        if (y <= 2.0) return {{0.0, y, 2.0 / y}};
        return {{0.0, 1.0, 1.0}, {y - 1.0, y, 1.0}};
      case DaughterFamily::KLLShrinkingEnds:
        if (y <= std::sqrt(2.0)) return {{0.0, y, 2.0 / y}};
        return {{0.0, 1.0 / y, y}, {y - 1.0 / y, y, y}};
    }
    return {};
  }

  bool piecewise_constant() const { return family_ != DaughterFamily::PowerLaw; }

  /// Exact value of  int_lo^hi x^k b(x, y, z) dx  (limits clipped to [0, y]), k >= 0.
  double partial_moment(double k, double lo, double hi, double y) const {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, y);
    if (!(hi > lo)) return 0.0;
    if (family_ == DaughterFamily::PowerLaw) {
      const double e = k + nu_ + 1.0;
      const double c = (nu_ + 2.0) / std::pow(y, nu_ + 1.0);
      return c * (std::pow(hi, e) - std::pow(lo, e)) / e;
    }
    double acc = 0.0;
    for (const auto& s : segments(y)) {
      const double a = std::max(lo, s.lo);
      const double b = std::min(hi, s.hi);
      if (b > a) acc += s.value * (std::pow(b, k + 1.0) - std::pow(a, k + 1.0)) / (k + 1.0);
    }
    return acc;
  }

  /// Sup over y in (0, size_bound] of 2 y^{p-1} int_0^y b^p dx, in closed form.
  /// Infinite when the integral diverges (PowerLaw with nu p <= -1).
  double derived_Bp(double p) const {
    const double uniform = std::pow(2.0, p + 1.0);
    switch (family_) {
      case DaughterFamily::PowerLaw:
        if (!(nu_ * p > -1.0)) return std::numeric_limits<double>::infinity();
        return 2.0 * std::pow(nu_ + 2.0, p) / (nu_ * p + 1.0);
      case DaughterFamily::UniformBinary:
        return uniform;
      case DaughterFamily::KLLUnitEnds:
        return size_bound_ > 2.0 ? std::max(uniform, 4.0 * std::pow(size_bound_, p - 1.0))
                                 : uniform;
      case DaughterFamily::KLLShrinkingEnds:
        return size_bound_ > std::sqrt(2.0)
                   ? std::max(uniform, 4.0 * std::pow(size_bound_, 2.0 * p - 2.0))
                   : uniform;
    }
    return uniform;
  }

 private:
  double sharp_fragment_count() const {
    if (family_ == DaughterFamily::PowerLaw) return (nu_ + 2.0) / (nu_ + 1.0);
    return 2.0;
  }

  DaughterFamily family_;
  double nu_;
  double p_;
  double size_bound_;
  double beta0_ = 2.0;
  double Bp_ = 0.0;
};

inline double eval_b(const DaughterSpec& b, double x, double y, double z) { return b(x, y, z); }

/// int_0^y b(x, y, z) dx in closed form.
inline double fragment_count(const DaughterSpec& b, double y, double z) {
  if (!(y > 0.0) || !(z > 0.0)) throw DomainError("fragment_count: arguments must be > 0");
  return b.partial_moment(0.0, 0.0, y, y);
}

struct SampleCheck {
  bool passed = true;
  double worst = 0.0;  // worst observed deviation or ratio, check-specific
  double worst_y = 0.0;
  double worst_z = 0.0;
  std::string detail;
};

/// Local mass conservation |int_0^y x b dx / y - 1| <= quad_tol over all (y, z).
/// PowerLaw is integrated by tanh-sinh quadrature; the piecewise-constant
/// families are integrated exactly on their segments.
inline SampleCheck check_lmc(const DaughterSpec& b, std::span<const double> ys,
                             std::span<const double> zs, double quad_tol) {
  SampleCheck r;
  for (double y : ys) {
    for (double z : zs) {
      double mass = 0.0;
      if (b.piecewise_constant()) {
        for (const auto& s : b.segments(y)) mass += s.value * (s.hi * s.hi - s.lo * s.lo) / 2.0;
      } else {
        try {
          auto q = quad::endpoint_singular([&](double x) { return x * b(x, y, z); }, 0.0, y,
                                           1e-14);
          mass = quad::require(q, 0.1 * quad_tol, "LMC integral");
        } catch (const QuadratureFailure& e) {
          r.passed = false;
          r.worst_y = y;
          r.worst_z = z;
          r.detail = e.what();
          return r;
        }
      }
      const double dev = std::abs(mass / y - 1.0);
      if (dev > r.worst) {
        r.worst = dev;
        r.worst_y = y;
        r.worst_z = z;
      }
    }
  }
  r.passed = r.worst <= quad_tol;
  return r;
}

/// Fragment-count bound int_0^y b dx <= beta0 over all (y, z); `worst` is the max count.
inline SampleCheck check_nop(const DaughterSpec& b, std::span<const double> ys,
                             std::span<const double> zs, double rel_tol = 1e-12) {
  SampleCheck r;
  for (double y : ys)
    for (double z : zs) {
      const double c = fragment_count(b, y, z);
      if (c > r.worst) {
        r.worst = c;
        r.worst_y = y;
        r.worst_z = z;
      }
    }
  r.passed = r.worst <= b.beta0() * (1.0 + rel_tol);
  return r;
}

struct PConditionReport {
  bool verifiable = true;
  bool passed = false;
  double Bp_observed = 0.0;
  double Bp_bound = 0.0;
  double worst_y = 0.0;
  std::string detail;
};

/// Structural L^p condition: sup over samples of 2 y^{p-1} int_0^y b^p dx, compared
/// against the configured Bp (or the derived one when p differs from the spec's p).
inline PConditionReport check_p_condition(const DaughterSpec& b, double p,
                                          std::span<const double> ys,
                                          std::span<const double> zs) {
  if (!(p > 1.0 && p < 2.0)) throw DomainError("check_p_condition: p must lie in (1, 2)");
  PConditionReport r;
  r.Bp_bound = (p == b.p()) ? b.Bp() : b.derived_Bp(p);
  if (b.family() == DaughterFamily::PowerLaw && !(b.nu() * p > -1.0)) {
    r.verifiable = false;
    r.passed = false;
    r.Bp_observed = std::numeric_limits<double>::infinity();
    std::ostringstream msg;
    msg << "int b^p diverges at the origin: nu*p = " << b.nu() * p << " <= -1";
    r.detail = msg.str();
    return r;
  }
  for (double y : ys)
    for (double z : zs) {
      double integral = 0.0;
      if (b.piecewise_constant()) {
        for (const auto& s : b.segments(y)) integral += std::pow(s.value, p) * (s.hi - s.lo);
      } else {
        auto q = quad::endpoint_singular([&](double x) { return std::pow(b(x, y, z), p); }, 0.0,
                                         y, 1e-13);
        integral = quad::require(q, 1e-9, "p-condition integral");
      }
      const double obs = 2.0 * std::pow(y, p - 1.0) * integral;
      if (obs > r.Bp_observed) {
        r.Bp_observed = obs;
        r.worst_y = y;
      }
    }
  r.passed = r.Bp_observed <= r.Bp_bound * (1.0 + 1e-10);
  return r;
}

/// Exact fragment sampling (uniform-binary only). The two fragments are built so that
/// their exact real sum is y: the larger fragment is y - u rounded, the smaller one is
/// recovered from it by an exact (Sterbenz) subtraction.
template <class URBG>
std::vector<double> sample_fragments(const DaughterSpec& b, double y, double z, URBG& rng) {
  if (!b.samplable())
    throw UnsupportedOperation("sample_fragments: no exact sampling recipe for " +
                               std::string(daughter_name(b.family())));
  if (!(y > 0.0) || !(z > 0.0)) throw DomainError("sample_fragments: arguments must be > 0");
  std::uniform_real_distribution<double> unif(0.0, y);
  for (;;) {
    const double u = unif(rng);
    if (!(u > 0.0) || !(u < y)) continue;
    if (u > 0.5 * y) return {u, y - u};
    const double big = y - u;
    const double small = y - big;
    if (small > 0.0) return {small, big};
    // u fell below the resolution of y: redraw
  }
}

}  // namespace nlbe
