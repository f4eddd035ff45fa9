#pragma once

// Candidate weights g and the admissible class: g > 0, g(x)/x non-decreasing, and
//   g(y) - int_0^y g(x) b(x, y, z) dx >= theta g(y)
// for a uniform theta in (0, 1). Membership is verified on y in (0, y_max] only,
// the range the truncated solver can reach.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlbe/daughter.hpp"
#include "nlbe/errors.hpp"
#include "nlbe/quadrature.hpp"

namespace nlbe {

enum class WeightFamily { Power, PowerShifted, PowerExp, PowerLog };

inline std::string_view weight_name(WeightFamily f) {
  switch (f) {
    case WeightFamily::Power: return "power";
    case WeightFamily::PowerShifted: return "power_shifted";
    case WeightFamily::PowerExp: return "power_exp";
    case WeightFamily::PowerLog: return "power_log";
  }
  return "?";
}

inline std::optional<WeightFamily> weight_family_from_name(std::string_view s) {
  for (auto f : {WeightFamily::Power, WeightFamily::PowerShifted, WeightFamily::PowerExp,
                 WeightFamily::PowerLog})
    if (weight_name(f) == s) return f;
  return std::nullopt;
}

struct WeightParams {
  double alpha = 2.0;
  double beta = 0.0;    // PowerShifted
  double lambda = 1.0;  // PowerExp
  double gamma = 1.0;   // PowerLog
};

/// A candidate weight x^alpha h(x). Any alpha > 0 is representable so that
/// non-members can be evaluated and rejected by the validators.
class WeightFunction {
 public:
  WeightFunction(WeightFamily family, WeightParams params) : family_(family), params_(params) {
    std::ostringstream err;
    if (!(params_.alpha > 0.0)) err << "alpha must be > 0; ";
    if (family_ == WeightFamily::PowerShifted && !(params_.beta >= 0.0))
      err << "beta must be >= 0; ";
    if (family_ == WeightFamily::PowerExp && !(params_.lambda > 0.0))
      err << "lambda must be > 0; ";
    if (family_ == WeightFamily::PowerLog && !(params_.gamma > 0.0)) err << "gamma must be > 0; ";
    if (!err.str().empty())
      throw DomainError("weight " + std::string(weight_name(family_)) + ": " + err.str());
  }

  WeightFamily family() const { return family_; }
  const WeightParams& params() const { return params_; }
  double alpha() const { return params_.alpha; }

  double operator()(double x) const {
    if (!(x > 0.0)) throw DomainError("eval_g: x must be > 0");
    const double base = std::pow(x, params_.alpha);
    switch (family_) {
      case WeightFamily::Power: return base;
      case WeightFamily::PowerShifted: return base * std::pow(1.0 + x, params_.beta);
      case WeightFamily::PowerExp: return base * std::exp(params_.lambda * x);
      case WeightFamily::PowerLog: return base * std::pow(std::log1p(x), params_.gamma);
    }
    return base;
  }

 private:
  WeightFamily family_;
  WeightParams params_;
};

/// An admissible weight: alpha > 1 and a dissipativity constant theta in (0, 1).
class WeightSpec {
 public:
  WeightSpec(WeightFunction g, double theta) : g_(g), theta_(theta) {
    if (!(g_.alpha() > 1.0))
      throw DomainError("weight: alpha must be > 1 for membership in the admissible class");
    if (!(theta_ > 0.0 && theta_ < 1.0)) throw DomainError("weight: theta must lie in (0, 1)");
  }

  const WeightFunction& function() const { return g_; }
  double theta() const { return theta_; }
  double operator()(double x) const { return g_(x); }

 private:
  WeightFunction g_;
  double theta_;
};

inline double eval_g(const WeightFunction& g, double x) { return g(x); }
inline double eval_g(const WeightSpec& g, double x) { return g(x); }

/// (alpha - 1) / (nu + alpha + 1): dissipativity constant of x^alpha against the
/// power-law daughter (nu + 2) x^nu / y^{nu+1}.
inline double closed_form_theta(double alpha, double nu) {
  return (alpha - 1.0) / (nu + alpha + 1.0);
}

/// (1/g(y)) int_0^y g(x) b(x, y, z) dx.
inline double dissipation_ratio(const WeightFunction& g, const DaughterSpec& b, double y,
                                double z) {
  double integral = 0.0;
  if (b.piecewise_constant()) {
    auto gx = [&](double x) { return x > 0.0 ? g(x) : 0.0; };
    for (const auto& s : b.segments(y)) {
      // g(x) = x^alpha is not smooth at 0 when alpha is not an integer
      auto q = s.lo == 0.0 ? quad::endpoint_singular(gx, s.lo, s.hi, 1e-14)
                           : quad::smooth(gx, s.lo, s.hi, 1e-14);
      integral += s.value * quad::require(q, 1e-10, "weighted fragment integral");
    }
  } else {
    // substitute x = y s so the singular factor sits at s = 0
    auto q = quad::endpoint_singular(
        [&](double s) { return s > 0.0 ? g(y * s) * b(y * s, y, z) : 0.0; }, 0.0, 1.0, 1e-15);
    integral = y * quad::require(q, 1e-11, "weighted fragment integral");
  }
  return integral / g(y);
}

struct ThetaEstimate {
  double theta_hat = 0.0;
  double argmin_y = 0.0;
  double ratio_min = 0.0;  // smallest dissipation ratio seen (spread diagnostic)
  double ratio_max = 0.0;
  bool member = false;     // theta_hat > 0
};

/// Infimum of 1 - dissipation_ratio over the (y, z) grid, followed by one refinement
/// pass of the same size between the neighbours of the arg-min.
inline ThetaEstimate estimate_theta(const WeightFunction& g, const DaughterSpec& b,
                                    std::span<const double> y_grid,
                                    std::span<const double> z_grid) {
  if (y_grid.empty() || z_grid.empty()) throw DomainError("estimate_theta: empty grid");
  ThetaEstimate e;
  e.ratio_min = std::numeric_limits<double>::infinity();
  e.ratio_max = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  auto visit = [&](double y, double z, std::size_t idx) {
    const double r = dissipation_ratio(g, b, y, z);
    if (r < e.ratio_min) e.ratio_min = r;
    if (r > e.ratio_max) {
      e.ratio_max = r;
      e.argmin_y = y;
      arg = idx;
    }
  };
  for (std::size_t i = 0; i < y_grid.size(); ++i)
    for (double z : z_grid) visit(y_grid[i], z, i);

  if (y_grid.size() >= 2) {
    const double lo = y_grid[arg == 0 ? 0 : arg - 1];
    const double hi = y_grid[std::min(arg + 1, y_grid.size() - 1)];
    const std::size_t m = y_grid.size();
    for (std::size_t i = 0; i < m; ++i) {
      const double y = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(m - 1));
      for (double z : z_grid) visit(y, z, arg);
    }
  }
  e.theta_hat = 1.0 - e.ratio_max;
  e.member = e.theta_hat > 0.0;
  return e;
}

/// 64-point log grid on [1e-4, y_max].
inline std::vector<double> default_theta_grid(double y_max) {
  std::vector<double> ys(64);
  const double lo = 1e-4;
  for (std::size_t i = 0; i < ys.size(); ++i)
    ys[i] = lo * std::pow(y_max / lo, static_cast<double>(i) / 63.0);
  return ys;
}

/// Builds an admissible weight paired with `b`. theta is the closed form when one
/// exists (pure power against power-law/uniform-binary), otherwise the numerical
/// infimum over (0, y_max] reduced by a 1% margin.
inline WeightSpec make_weight(const WeightFunction& g, const DaughterSpec& b, double y_max) {
  if (!(g.alpha() > 1.0))
    throw DomainError("weight: alpha must be > 1 for membership in the admissible class");
  const bool power_law_b =
      b.family() == DaughterFamily::PowerLaw || b.family() == DaughterFamily::UniformBinary;
  if (g.family() == WeightFamily::Power && power_law_b) {
    const double nu = b.family() == DaughterFamily::PowerLaw ? b.nu() : 0.0;
    return WeightSpec(g, closed_form_theta(g.alpha(), nu));
  }
  const auto ys = default_theta_grid(y_max);
  const double z1[] = {1.0};
  const auto est = estimate_theta(g, b, ys, z1);
  if (!est.member) {
    std::ostringstream msg;
    msg << "weight " << weight_name(g.family()) << " is not dissipative for daughter "
        << daughter_name(b.family()) << " (theta_hat = " << est.theta_hat << " at y = "
        << est.argmin_y << ")";
    throw DomainError(msg.str());
  }
  return WeightSpec(g, 0.99 * est.theta_hat);
}

/// True iff g(x)/x is non-decreasing along the sorted samples (relative tolerance).
inline bool check_ratio_monotone(const WeightFunction& g, std::span<const double> samples,
                                 double rel_tol = 1e-10) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double prev = g(samples[i - 1]) / samples[i - 1];
    const double cur = g(samples[i]) / samples[i];
    if (cur < prev - rel_tol * std::abs(prev)) return false;
  }
  return true;
}

}  // namespace nlbe
