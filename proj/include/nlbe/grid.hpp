#pragma once

// Geometric sectional grid on [x_min, n], cell-integrated states, and the analytic
// initial densities the runs start from.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlbe/errors.hpp"
#include "nlbe/quadrature.hpp"

namespace nlbe {

class GridSpec {
 public:
  GridSpec(double x_min, double n, std::size_t cells) : x_min_(x_min), n_(n), cells_(cells) {
    if (!(x_min > 0.0) || !(x_min < n) || cells < 1) {
      std::ostringstream msg;
      msg << "build_grid: need 0 < x_min < n and cells >= 1 (got x_min=" << x_min << ", n=" << n
          << ", cells=" << cells << ")";
      throw DomainError(msg.str());
    }
    ratio_ = std::pow(n / x_min, 1.0 / static_cast<double>(cells));
    edges_.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
      edges_[i] = x_min * std::pow(ratio_, static_cast<double>(i));
    edges_.front() = x_min;
    edges_.back() = n;
    pivots_.resize(cells);
    widths_.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      pivots_[i] = 0.5 * (edges_[i] + edges_[i + 1]);
      widths_[i] = edges_[i + 1] - edges_[i];
    }
  }

  double x_min() const { return x_min_; }
  double n() const { return n_; }
  std::size_t cells() const { return cells_; }
  double ratio() const { return ratio_; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& pivots() const { return pivots_; }
  const std::vector<double>& widths() const { return widths_; }

 private:
  double x_min_;
  double n_;
  std::size_t cells_;
  double ratio_ = 1.0;
  std::vector<double> edges_;
  std::vector<double> pivots_;
  std::vector<double> widths_;
};

inline GridSpec build_grid(double x_min, double n, std::size_t cells) {
  return GridSpec(x_min, n, cells);
}

/// u_i ~ number of particles in cell i at time t.
struct StateVector {
  std::vector<double> counts;
  double t = 0.0;
};

/// Closed-form initial densities. Only what the runs and the particle oracle need:
/// pointwise values, breakpoints for quadrature, normalisation on (0, n), and
/// exact sampling from the normalised density truncated to (0, n).
class InitialDensity {
 public:
  enum class Kind { Zero, Exponential, Indicator };

  static InitialDensity zero() { return InitialDensity(Kind::Zero, 0.0, 0.0, 0.0); }
  /// amplitude * exp(-rate x)
  static InitialDensity exponential(double amplitude = 1.0, double rate = 1.0) {
    if (!(amplitude > 0.0) || !(rate > 0.0))
      throw DomainError("exponential density: amplitude and rate must be > 0");
    return InitialDensity(Kind::Exponential, amplitude, rate, 0.0);
  }
  /// height on (lo, hi)
  static InitialDensity indicator(double lo, double hi, double height = 1.0) {
    if (!(lo >= 0.0) || !(hi > lo) || !(height > 0.0))
      throw DomainError("indicator density: need 0 <= lo < hi and height > 0");
    return InitialDensity(Kind::Indicator, height, lo, hi);
  }

  Kind kind() const { return kind_; }
  double amplitude() const { return a_; }
  double rate() const { return b_; }
  double lo() const { return b_; }
  double hi() const { return c_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Exponential: return a_ * std::exp(-b_ * x);
      case Kind::Indicator: return (x > b_ && x < c_) ? a_ : 0.0;
    }
    return 0.0;
  }

  /// Interior points where the density is not smooth.
  std::vector<double> breakpoints() const {
    if (kind_ == Kind::Indicator) return {b_, c_};
    return {};
  }

  /// int_0^n f dx
  double number(double n) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Exponential: return a_ * (-std::expm1(-b_ * n)) / b_;
      case Kind::Indicator: return a_ * std::max(0.0, std::min(c_, n) - b_);
    }
    return 0.0;
  }

  /// int_0^n x f dx
  double mass(double n) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Exponential: {
        // a/r^2 (1 - e^{-rn}(1 + rn))
        const double rn = b_ * n;
        return a_ / (b_ * b_) * (-std::expm1(-rn) - rn * std::exp(-rn));
      }
      case Kind::Indicator: {
        const double h = std::min(c_, n);
        return h > b_ ? a_ * (h * h - b_ * b_) / 2.0 : 0.0;
      }
    }
    return 0.0;
  }

  /// One draw from f / int_0^n f on (0, n), by inversion.
  template <class URBG>
  double sample(URBG& rng, double n) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (kind_) {
      case Kind::Zero:
        throw DomainError("cannot sample the zero density");
      case Kind::Exponential: {
        const double tail = -std::expm1(-b_ * n);  // 1 - e^{-rn}
        for (;;) {
          const double x = -std::log1p(-unif(rng) * tail) / b_;
          if (x > 0.0 && x < n) return x;
        }
      }
      case Kind::Indicator: {
        const double h = std::min(c_, n);
        if (!(h > b_)) throw DomainError("indicator density has no mass below n");
        for (;;) {
          const double x = b_ + unif(rng) * (h - b_);
          if (x > b_ && x < h) return x;
        }
      }
    }
    return 0.0;
  }

 private:
  InitialDensity(Kind k, double a, double b, double c) : kind_(k), a_(a), b_(b), c_(c) {}
  Kind kind_;
  double a_;
  double b_;
  double c_;
};

struct Projection {
  StateVector state;
  double dropped_number = 0.0;  // int_0^{x_min} f
  double dropped_mass = 0.0;    // int_0^{x_min} x f
};

/// u_i = int_{cell i} f dx by adaptive quadrature, split at the density's breakpoints.
inline Projection project_initial(const InitialDensity& f, const GridSpec& grid) {
  Projection out;
  out.state.counts.assign(grid.cells(), 0.0);
  const auto bp = f.breakpoints();
  auto integrate = [&](auto&& fn, double a, double b, std::size_t cell) {
    std::vector<double> cuts{a};
    for (double p : bp)
      if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      auto q = quad::smooth(fn, cuts[k], cuts[k + 1], 1e-14);
      try {
        acc += quad::require(q, 1e-10, "initial projection");
      } catch (const QuadratureFailure& e) {
        throw QuadratureFailure(std::string(e.what()) + " (cell " + std::to_string(cell) + ")");
      }
    }
    return acc;
  };
  if (f.kind() == InitialDensity::Kind::Zero) return out;
  const auto& e = grid.edges();
  for (std::size_t i = 0; i < grid.cells(); ++i)
    out.state.counts[i] = integrate([&](double x) { return f(x); }, e[i], e[i + 1], i);
  out.dropped_number = integrate([&](double x) { return f(x); }, 0.0, grid.x_min(), 0);
  out.dropped_mass = integrate([&](double x) { return x * f(x); }, 0.0, grid.x_min(), 0);
  return out;
}

}  // namespace nlbe
