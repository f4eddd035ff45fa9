#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "nlbe/grid.hpp"
#include "nlbe/operators.hpp"

using namespace nlbe;

namespace {

DaughterSpec make(DaughterFamily f, double nu = 0.0, double size_bound = 10.0) {
  DaughterSpec::Options o;
  o.nu = nu;
  o.size_bound = size_bound;
  return DaughterSpec(f, o);
}

KernelSpec kernel(KernelFamily f, double ell, double n = 10.0) {
  KernelParams p;
  p.ell = ell;
  p.p = 2.0;
  return KernelSpec(f, p, 1.0, std::nullopt, n);
}

double column_sum(const OperatorSet& ops, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i <= j; ++i) s += ops.frag_alloc(i, j);
  return s;
}

double column_mass(const OperatorSet& ops, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i <= j; ++i) s += ops.pivots[i] * ops.frag_alloc(i, j);
  return s;
}

// du_i = sum_{j,k} N(i,j) u_j a(xbar_j, xbar_k) u_k - u_i sum_k a(xbar_i, xbar_k) u_k
std::vector<double> brute_rhs(const std::vector<double>& u, const OperatorSet& ops,
                              const KernelSpec& k) {
  const auto& xb = ops.pivots;
  const std::size_t C = xb.size();
  std::vector<double> du(C, 0.0);
  for (std::size_t i = 0; i < C; ++i) {
    for (std::size_t j = i; j < C; ++j)
      for (std::size_t q = 0; q < C; ++q) du[i] += ops.frag_alloc(i, j) * u[j] * k(xb[j], xb[q]) * u[q];
    for (std::size_t q = 0; q < C; ++q) du[i] -= u[i] * k(xb[i], xb[q]) * u[q];
  }
  return du;
}

}  // namespace

TEST(Grid, GeometricSpacing) {
  const GridSpec g(1e-3, 10.0, 60);
  EXPECT_NEAR(g.ratio(), std::pow(10.0, 4.0 / 60.0), 1e-15);
  EXPECT_EQ(g.edges().front(), 1e-3);
  EXPECT_EQ(g.edges().back(), 10.0);
  for (std::size_t i = 0; i < 60; ++i) {
    EXPECT_NEAR(g.edges()[i + 1] / g.edges()[i], g.ratio(), 1e-12);
    EXPECT_DOUBLE_EQ(g.pivots()[i], 0.5 * (g.edges()[i] + g.edges()[i + 1]));
  }
}

TEST(Grid, SingleCell) {
  const GridSpec g(1e-3, 10.0, 1);
  EXPECT_DOUBLE_EQ(g.pivots()[0], 0.5 * (1e-3 + 10.0));
  EXPECT_DOUBLE_EQ(g.widths()[0], 10.0 - 1e-3);
}

TEST(Grid, RejectsDegenerateInput) {
  EXPECT_THROW(GridSpec(2.0, 1.0, 10), DomainError);
  EXPECT_THROW(GridSpec(0.0, 1.0, 10), DomainError);
  EXPECT_THROW(GridSpec(1e-3, 10.0, 0), DomainError);
}

TEST(Projection, ExponentialCountsMatchClosedForm) {
  const GridSpec g(1e-3, 10.0, 120);
  const auto p = project_initial(InitialDensity::exponential(), g);
  const double sum = std::accumulate(p.state.counts.begin(), p.state.counts.end(), 0.0);
  EXPECT_NEAR(sum, std::exp(-1e-3) - std::exp(-10.0), 1e-9);
  EXPECT_NEAR(p.dropped_number, -std::expm1(-1e-3), 1e-15);
  // int_0^d x e^{-x} dx = 1 - e^{-d}(1 + d)
  EXPECT_NEAR(p.dropped_mass, 1.0 - std::exp(-1e-3) * (1.0 + 1e-3), 1e-15);
  const auto& e = g.edges();
  for (std::size_t i = 0; i < g.cells(); ++i)
    ASSERT_NEAR(p.state.counts[i], std::exp(-e[i]) - std::exp(-e[i + 1]),
                1e-12 * p.state.counts[i]);
}

TEST(Projection, ZeroAndIndicator) {
  const GridSpec g(1e-3, 10.0, 60);
  const auto z = project_initial(InitialDensity::zero(), g);
  for (double c : z.state.counts) EXPECT_EQ(c, 0.0);
  const auto ind = project_initial(InitialDensity::indicator(0.5, 2.0), g);
  const double sum = std::accumulate(ind.state.counts.begin(), ind.state.counts.end(), 0.0);
  EXPECT_NEAR(sum, 1.5, 1e-12);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    if (g.edges()[i + 1] <= 0.5 || g.edges()[i] >= 2.0) {
      EXPECT_EQ(ind.state.counts[i], 0.0);
    }
  }
}

TEST(Allocation, ColumnsConserveMassToRounding) {
  const GridSpec g(1e-3, 10.0, 120);
  for (auto f : {DaughterFamily::PowerLaw, DaughterFamily::UniformBinary,
                 DaughterFamily::KLLUnitEnds, DaughterFamily::KLLShrinkingEnds}) {
    const auto ops = assemble_operators(kernel(KernelFamily::PowerLaw, 1.0), make(f), g);
    for (std::size_t j = 0; j < g.cells(); ++j)
      ASSERT_NEAR(column_mass(ops, j), g.pivots()[j], 1e-13 * g.pivots()[j])
          << daughter_name(f) << " column " << j;
  }
}

TEST(Allocation, UniformBinaryColumnSumFormula) {
  // Fragments below xbar_0 land on xbar_0, inflating mass by xbar_0^2 / y before the
  // mass rescale, so the column sum is 2 / (1 + (xbar_0 / xbar_j)^2).
  const GridSpec g(1e-3, 10.0, 120);
  const auto ops = assemble_operators(kernel(KernelFamily::PowerLaw, 1.0),
                                      make(DaughterFamily::UniformBinary), g);
  const double x0 = g.pivots()[0];
  for (std::size_t j = 0; j < g.cells(); ++j) {
    const double r = x0 / g.pivots()[j];
    ASSERT_NEAR(column_sum(ops, j), 2.0 / (1.0 + r * r), 1e-12) << "column " << j;
  }
  EXPECT_NEAR(column_sum(ops, 0), 1.0, 1e-14);
  EXPECT_NEAR(column_sum(ops, g.cells() - 1), 2.0, 1e-7);
}

TEST(Allocation, ColumnSumsBoundedByBeta0) {
  const GridSpec g(1e-3, 10.0, 90);
  for (double nu : {0.0, -0.5, -0.9}) {
    const auto b = make(DaughterFamily::PowerLaw, nu);
    const auto ops = assemble_operators(kernel(KernelFamily::PowerLaw, 1.0), b, g);
    for (std::size_t j = 0; j < g.cells(); ++j) {
      ASSERT_LE(column_sum(ops, j), b.beta0() * (1.0 + 1e-12));
      for (std::size_t i = 0; i <= j; ++i) ASSERT_GE(ops.frag_alloc(i, j), 0.0);
      for (std::size_t i = j + 1; i < g.cells(); ++i) ASSERT_EQ(ops.frag_alloc(i, j), 0.0);
    }
  }
}

TEST(Allocation, SingleCellColumnIsOne) {
  const GridSpec g(1e-3, 10.0, 1);
  const auto ops = assemble_operators(kernel(KernelFamily::PowerLaw, 1.0),
                                      make(DaughterFamily::UniformBinary), g);
  EXPECT_DOUBLE_EQ(ops.frag_alloc(0, 0), 1.0);
  StateVector s{{3.0}, 0.0};
  EXPECT_EQ(rhs(s, ops)[0], 0.0);
}

TEST(Allocation, KernelTruncationMustMatchGrid) {
  const GridSpec g(1e-3, 10.0, 30);
  EXPECT_THROW(assemble_operators(kernel(KernelFamily::PowerLaw, 1.0, 5.0),
                                  make(DaughterFamily::UniformBinary), g),
               DomainError);
}

TEST(Allocation, PartnerResolvedStorageAgrees) {
  const GridSpec g(1e-3, 10.0, 40);
  const auto k = kernel(KernelFamily::PowerLaw, 0.5);
  const auto b = make(DaughterFamily::PowerLaw, -0.25);
  const auto flat = assemble_operators(k, b, g);
  AssembleOptions opt;
  opt.z_resolved = true;
  const auto full = assemble_operators(k, b, g, opt);
  ASSERT_TRUE(full.frag_alloc.z_resolved());
  const auto u = project_initial(InitialDensity::exponential(), g).state;
  const auto a = rhs(u, flat);
  const auto c = rhs(u, full);
  for (std::size_t i = 0; i < g.cells(); ++i) ASSERT_NEAR(a[i], c[i], 1e-13 * std::abs(a[i]) + 1e-300);
}

TEST(Rhs, ZeroStateIsStationary) {
  const GridSpec g(1e-3, 10.0, 30);
  const auto ops = assemble_operators(kernel(KernelFamily::PowerLaw, 1.0),
                                      make(DaughterFamily::UniformBinary), g);
  StateVector s{std::vector<double>(30, 0.0), 0.0};
  for (double d : rhs(s, ops)) EXPECT_EQ(d, 0.0);
}

TEST(Rhs, MonodisperseState) {
  const GridSpec g(1e-3, 10.0, 60);
  const auto k = kernel(KernelFamily::PowerLaw, 1.0);
  const auto ops = assemble_operators(k, make(DaughterFamily::UniformBinary), g);
  const std::size_t j = 45;
  const double u = 0.7;
  StateVector s{std::vector<double>(60, 0.0), 0.0};
  s.counts[j] = u;
  const auto du = rhs(s, ops);
  double dM0 = 0.0, dM1 = 0.0;
  for (std::size_t i = 0; i < 60; ++i) {
    dM0 += du[i];
    dM1 += g.pivots()[i] * du[i];
  }
  const double xj = g.pivots()[j];
  const double r = g.pivots()[0] / xj;
  const double colsum = 2.0 / (1.0 + r * r);
  EXPECT_NEAR(dM1, 0.0, 1e-14 * u * u * xj * xj * xj);
  EXPECT_NEAR(dM0, (colsum - 1.0) * u * u * xj * xj, 1e-12 * u * u * xj * xj);
}

TEST(Rhs, MatchesBruteForceForProductAndSplitKernels) {
  const GridSpec g(1e-3, 10.0, 24);
  const auto u = project_initial(InitialDensity::exponential(), g).state.counts;
  for (auto f : {KernelFamily::PowerLaw, KernelFamily::PiecewiseSplit}) {
    const auto k = kernel(f, 0.75);
    const auto ops = assemble_operators(k, make(DaughterFamily::KLLUnitEnds), g);
    EXPECT_EQ(ops.product_kernel, f != KernelFamily::PiecewiseSplit);
    const auto ref = brute_rhs(u, ops, k);
    StateVector s{u, 0.0};
    const auto du = rhs(s, ops);
    double scale = 0.0;
    for (double r : ref) scale = std::max(scale, std::abs(r));
    for (std::size_t i = 0; i < g.cells(); ++i) ASSERT_NEAR(du[i], ref[i], 1e-12 * scale);
  }
}
