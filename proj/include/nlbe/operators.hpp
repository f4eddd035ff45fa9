#pragma once

// Discrete collision-breakage operators on a sectional grid.
//
//   du_i/dt = sum_j sum_k N[i][j][k] u_j K[j][k] u_k  -  u_i sum_k K[i][k] u_k
//
// N[i][j][k] is the expected number of fragments deposited on pivot i when a particle
// at pivot j breaks after colliding with one at pivot k. Fragments lying between two
// pivots are split between them so that both number and mass are preserved; fragments
// below the smallest pivot go to it number-preserving, and each column is finally
// rescaled so that sum_i xbar_i N[i][j] = xbar_j holds to rounding.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nlbe/daughter.hpp"
#include "nlbe/errors.hpp"
#include "nlbe/grid.hpp"
#include "nlbe/kernel.hpp"

namespace nlbe {

class FragmentAllocation {
 public:
  FragmentAllocation() = default;
  FragmentAllocation(std::size_t cells, bool z_resolved)
      : cells_(cells),
        z_resolved_(z_resolved),
        data_(z_resolved ? cells * cells * cells : cells * cells, 0.0) {}

  std::size_t cells() const { return cells_; }
  /// False when N does not depend on the partner and is stored as N[i][j].
  bool z_resolved() const { return z_resolved_; }

  double operator()(std::size_t i, std::size_t j, std::size_t k = 0) const {
    return data_[index(i, j, k)];
  }
  double& at(std::size_t i, std::size_t j, std::size_t k = 0) { return data_[index(i, j, k)]; }

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return z_resolved_ ? (k * cells_ + j) * cells_ + i : j * cells_ + i;
  }
  std::size_t cells_ = 0;
  bool z_resolved_ = false;
  std::vector<double> data_;  // column-major in i for contiguous column access
};

struct OperatorSet {
  FragmentAllocation frag_alloc;
  std::vector<double> rate_matrix;   // K[j * C + k] = a_n(xbar_j, xbar_k)
  std::vector<double> omega_pivots;  // omega(xbar_j)
  std::vector<double> pivots;
  double A0 = 1.0;
  bool product_kernel = true;

  std::size_t cells() const { return pivots.size(); }
  double K(std::size_t j, std::size_t k) const { return rate_matrix[j * cells() + k]; }
};

struct AssembleOptions {
  /// Store N with a partner index even when b ignores z.
  bool z_resolved = false;
};

namespace detail {

// Column j of the allocation for a parent of size y colliding with a partner of size z.
inline void allocate_column(const DaughterSpec& b, const std::vector<double>& xb, std::size_t j,
                            double y, double z, FragmentAllocation& N, std::size_t k) {
  (void)z;  // catalog daughters ignore the partner size
  // (0, xbar_0): number-preserving deposit on pivot 0
  N.at(0, j, k) += b.partial_moment(0.0, 0.0, xb[0], y);
  for (std::size_t i = 0; i < j; ++i) {
    const double lo = xb[i];
    const double hi = xb[i + 1];
    const double p0 = b.partial_moment(0.0, lo, hi, y);
    const double p1 = b.partial_moment(1.0, lo, hi, y);
    const double h = hi - lo;
    N.at(i, j, k) += std::max(0.0, (hi * p0 - p1) / h);
    N.at(i + 1, j, k) += std::max(0.0, (p1 - lo * p0) / h);
  }
  double mass = 0.0;
  for (std::size_t i = 0; i <= j; ++i) mass += xb[i] * N(i, j, k);
  if (mass > 0.0) {
    const double s = xb[j] / mass;
    for (std::size_t i = 0; i <= j; ++i) N.at(i, j, k) *= s;
  }
}

}  // namespace detail

inline OperatorSet assemble_operators(const KernelSpec& kernel, const DaughterSpec& daughter,
                                      const GridSpec& grid, AssembleOptions opt = {}) {
  if (kernel.truncation() && std::abs(*kernel.truncation() - grid.n()) > 1e-12 * grid.n())
    throw DomainError("assemble_operators: kernel truncation n differs from grid n");
  const std::size_t C = grid.cells();
  const auto& xb = grid.pivots();

  OperatorSet ops;
  ops.pivots = xb;
  ops.A0 = kernel.A0();
  ops.product_kernel = kernel.is_product();
  ops.omega_pivots.resize(C);
  for (std::size_t j = 0; j < C; ++j) ops.omega_pivots[j] = kernel.omega(xb[j]);
  ops.rate_matrix.resize(C * C);
  for (std::size_t j = 0; j < C; ++j)
    for (std::size_t k = 0; k < C; ++k) ops.rate_matrix[j * C + k] = kernel(xb[j], xb[k]);

  const bool z_resolved = opt.z_resolved || !daughter.z_independent();
  ops.frag_alloc = FragmentAllocation(C, z_resolved);
  if (z_resolved) {
    for (std::size_t k = 0; k < C; ++k)
      for (std::size_t j = 0; j < C; ++j)
        detail::allocate_column(daughter, xb, j, xb[j], xb[k], ops.frag_alloc, k);
  } else {
    for (std::size_t j = 0; j < C; ++j)
      detail::allocate_column(daughter, xb, j, xb[j], xb[j], ops.frag_alloc, 0);
  }
  return ops;
}

/// Per-particle collision rate L_j = sum_k K[j][k] u_k. O(C) for product kernels.
inline void collision_rates(std::span<const double> u, const OperatorSet& ops,
                            std::span<double> L) {
  const std::size_t C = ops.cells();
  if (ops.product_kernel) {
    double S = 0.0;
    for (std::size_t k = 0; k < C; ++k) S += ops.omega_pivots[k] * u[k];
    for (std::size_t j = 0; j < C; ++j) L[j] = ops.A0 * ops.omega_pivots[j] * S;
  } else {
    for (std::size_t j = 0; j < C; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < C; ++k) acc += ops.rate_matrix[j * C + k] * u[k];
      L[j] = acc;
    }
  }
}

/// du/dt; `scratch` must hold at least C values.
inline void rhs(std::span<const double> u, const OperatorSet& ops, std::span<double> du,
                std::span<double> scratch) {
  const std::size_t C = ops.cells();
  const auto& N = ops.frag_alloc;
  auto L = scratch.first(C);
  collision_rates(u, ops, L);
  std::fill(du.begin(), du.end(), 0.0);
  if (!N.z_resolved()) {
    for (std::size_t j = 0; j < C; ++j) {
      const double r = u[j] * L[j];
      if (r == 0.0) continue;
      for (std::size_t i = 0; i <= j; ++i) du[i] += N(i, j) * r;
    }
  } else {
    for (std::size_t j = 0; j < C; ++j) {
      if (u[j] == 0.0) continue;
      for (std::size_t k = 0; k < C; ++k) {
        const double r = u[j] * ops.K(j, k) * u[k];
        if (r == 0.0) continue;
        for (std::size_t i = 0; i <= j; ++i) du[i] += N(i, j, k) * r;
      }
    }
  }
  for (std::size_t i = 0; i < C; ++i) du[i] -= u[i] * L[i];
}

inline std::vector<double> rhs(const StateVector& s, const OperatorSet& ops) {
  std::vector<double> du(ops.cells()), scratch(ops.cells());
  rhs(s.counts, ops, du, scratch);
  return du;
}

}  // namespace nlbe
