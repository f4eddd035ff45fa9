#pragma once

// Product-type collision kernels a(x, y) = A0 * omega(x) * omega(y).
//
// omega is one function with a branch at x = 1: the small-size factor on (0, 1]
// and the large-size factor on (1, inf). Families I-VII use the same closed form
// on both sides. Family VIII keeps its indicator structure: the kernel vanishes
// on the mixed region x <= 1 < y, so it is not a global product.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlbe/errors.hpp"

namespace nlbe {

enum class KernelFamily {
  PowerLaw,         // I    x^l
  PowerLawShifted,  // II   x^l (1+x)^beta
  PowerLawExp,      // III  x^l e^{gamma x}
  PowerLawLog,      // IV   x^l log(1+x)^gamma
  StretchedExp,     // V    x^l e^{gamma x^nu}
  RationalDamped,   // VI   x^l / (1+x)^mu
  SaturatingExp,    // VII  x^l (2 - e^{-x})
  PiecewiseSplit,   // VIII x^l on x,y <= 1 and x^p on x,y >= 1, zero across
};

inline constexpr std::array<std::string_view, 8> kKernelLabels = {"I", "II", "III", "IV",
                                                                  "V", "VI", "VII", "VIII"};

inline std::string_view kernel_label(KernelFamily f) {
  return kKernelLabels[static_cast<std::size_t>(f)];
}

inline std::optional<KernelFamily> kernel_family_from_label(std::string_view label) {
  for (std::size_t i = 0; i < kKernelLabels.size(); ++i)
    if (kKernelLabels[i] == label) return static_cast<KernelFamily>(i);
  return std::nullopt;
}

struct KernelParams {
  double ell = 1.0;
  double beta = 0.0;   // II
  double gamma = 1.0;  // III, IV, V
  double nu = 1.0;     // V
  double mu = 0.5;     // VI
  double p = 2.0;      // VIII large-size exponent
};

enum class Regime { SubLinear, SuperLinear };

inline std::string_view regime_name(Regime r) {
  return r == Regime::SubLinear ? "SubLinear" : "SuperLinear";
}

/// ell < 1/2 is the sub-linear regime; ell >= 1/2 (boundary included) is super-linear.
inline Regime classify_regime(double ell) {
  if (!(ell > 0.0)) throw DomainError("classify_regime: ell must be > 0");
  return ell < 0.5 ? Regime::SubLinear : Regime::SuperLinear;
}

class KernelSpec {
 public:
  /// `A1` defaults to the smallest constant with omega_0(x) <= A1 x^ell on (0, 1).
  /// `n` enables truncation: a_n(x, y) = 0 when max(x, y) >= n.
  KernelSpec(KernelFamily family, KernelParams params, double A0 = 1.0,
             std::optional<double> A1 = std::nullopt, std::optional<double> n = std::nullopt)
      : family_(family), params_(params), A0_(A0), n_(n) {
    validate();
    A1_ = A1 ? *A1 : sharp_A1();
    if (!(A1_ > 0.0)) throw DomainError("kernel: A1 must be > 0");
  }

  KernelFamily family() const { return family_; }
  const KernelParams& params() const { return params_; }
  double A0() const { return A0_; }
  double A1() const { return A1_; }
  double ell() const { return params_.ell; }
  std::optional<double> truncation() const { return n_; }
  Regime regime() const { return classify_regime(params_.ell); }

  /// True when a(x, y) = A0 omega(x) omega(y) on the whole quadrant.
  bool is_product() const { return family_ != KernelFamily::PiecewiseSplit; }

  double omega(double x) const {
    if (!(x > 0.0)) throw DomainError("omega: x must be > 0");
    const auto& q = params_;
    const double base = std::pow(x, q.ell);
    switch (family_) {
      case KernelFamily::PowerLaw:
        return base;
      case KernelFamily::PowerLawShifted:
        return base * std::pow(1.0 + x, q.beta);
      case KernelFamily::PowerLawExp:
        return base * std::exp(q.gamma * x);
      case KernelFamily::PowerLawLog:
        return base * std::pow(std::log1p(x), q.gamma);
      case KernelFamily::StretchedExp:
        return base * std::exp(q.gamma * std::pow(x, q.nu));
      case KernelFamily::RationalDamped:
        return base / std::pow(1.0 + x, q.mu);
      case KernelFamily::SaturatingExp:
        return base * (2.0 - std::exp(-x));
      case KernelFamily::PiecewiseSplit:
        return x <= 1.0 ? base : std::pow(x, q.p);
    }
    return 0.0;
  }

  /// Untruncated kernel a(x, y).
  double full(double x, double y) const {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("kernel: sizes must be > 0");
    if (family_ == KernelFamily::PiecewiseSplit) {
      // The two indicator sets overlap only at (1, 1); the small branch wins there.
      if (x <= 1.0 && y <= 1.0) return A0_ * std::pow(x * y, params_.ell);
      if (x >= 1.0 && y >= 1.0) return A0_ * std::pow(x * y, params_.p);
      return 0.0;
    }
    // product formed first so that a(x, y) == a(y, x) bitwise
    return A0_ * (omega(x) * omega(y));
  }

  /// a_n(x, y) when truncation is enabled, a(x, y) otherwise.
  double operator()(double x, double y) const {
    if (n_ && (x >= *n_ || y >= *n_)) {
      if (!(x > 0.0) || !(y > 0.0)) throw DomainError("kernel: sizes must be > 0");
      return 0.0;
    }
    return full(x, y);
  }

 private:
  void validate() const {
    const auto& q = params_;
    std::ostringstream err;
    if (!(A0_ > 0.0)) err << "A0 must be > 0; ";
    if (!(q.ell > 0.0)) err << "ell must be > 0; ";
    if (n_ && !(*n_ > 0.0)) err << "n must be > 0; ";
    switch (family_) {
      case KernelFamily::PowerLawShifted:
        if (!(q.beta >= 0.0)) err << "beta must be >= 0; ";
        break;
      case KernelFamily::PowerLawExp:
      case KernelFamily::PowerLawLog:
        if (!(q.gamma > 0.0)) err << "gamma must be > 0; ";
        break;
      case KernelFamily::StretchedExp:
        if (!(q.gamma > 0.0)) err << "gamma must be > 0; ";
        if (!(q.nu > 0.0)) err << "nu must be > 0; ";
        break;
      case KernelFamily::RationalDamped:
        if (!(q.mu > 0.0 && q.ell > q.mu)) err << "family VI requires ell > mu > 0; ";
        break;
      case KernelFamily::PiecewiseSplit:
        if (!(q.p > q.ell)) err << "family VIII requires p > ell; ";
        break;
      default:
        break;
    }
    if (!err.str().empty())
      throw DomainError("kernel " + std::string(kernel_label(family_)) + ": " + err.str());
  }

  // sup over (0, 1) of omega(x) / x^ell, in closed form.
  double sharp_A1() const {
    const auto& q = params_;
    switch (family_) {
      case KernelFamily::PowerLaw:
      case KernelFamily::RationalDamped:
      case KernelFamily::PiecewiseSplit:
        return 1.0;
      case KernelFamily::PowerLawShifted:
        return std::pow(2.0, q.beta);
      case KernelFamily::PowerLawExp:
      case KernelFamily::StretchedExp:
        return std::exp(q.gamma);
      case KernelFamily::PowerLawLog:
        return std::pow(std::log(2.0), q.gamma);
      case KernelFamily::SaturatingExp:
        return 2.0 - std::exp(-1.0);
    }
    return 1.0;
  }

  KernelFamily family_;
  KernelParams params_;
  double A0_;
  double A1_ = 1.0;
  std::optional<double> n_;
};

inline double eval_omega(const KernelSpec& k, double x) { return k.omega(x); }
inline double eval_kernel(const KernelSpec& k, double x, double y) { return k(x, y); }

struct GrowthReport {
  bool holds = false;
  double worst_ratio = 0.0;
  double worst_x = 0.0;
};

/// Samples omega(x) / (A1 x^ell) on a log-spaced grid of (0, 1).
inline GrowthReport verify_growth_bound(const KernelSpec& k, std::size_t sample_count,
                                        double rel_tol = 1e-10) {
  if (sample_count == 0) throw DomainError("verify_growth_bound: sample_count must be >= 1");
  GrowthReport r;
  r.worst_ratio = -std::numeric_limits<double>::infinity();
  const double lo = std::log(1e-12);
  for (std::size_t i = 0; i < sample_count; ++i) {
    // endpoints 1e-12 and just below 1; x = 1 itself is excluded
    const double s =
        sample_count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(sample_count - 1);
    const double x = std::exp(lo * (1.0 - s)) * (1.0 - 1e-12);
    const double ratio = k.omega(x) / (k.A1() * std::pow(x, k.ell()));
    if (ratio > r.worst_ratio) {
      r.worst_ratio = ratio;
      r.worst_x = x;
    }
  }
  r.holds = r.worst_ratio <= 1.0 + rel_tol;
  return r;
}

}  // namespace nlbe
