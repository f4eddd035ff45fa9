#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nlbe/diagnostics.hpp"

using namespace nlbe;

namespace {

KernelSpec product_kernel(double ell) {
  KernelParams p;
  p.ell = ell;
  return KernelSpec(KernelFamily::PowerLaw, p, 1.0, std::nullopt, 10.0);
}

DaughterSpec daughter(DaughterFamily f, double nu = 0.0) {
  DaughterSpec::Options o;
  o.nu = nu;
  o.size_bound = 10.0;
  return DaughterSpec(f, o);
}

WeightSpec power_weight(double alpha, double theta) {
  WeightParams p;
  p.alpha = alpha;
  return WeightSpec(WeightFunction(WeightFamily::Power, p), theta);
}

Trajectory run(std::size_t cells, double ell = 1.0,
               DaughterFamily f = DaughterFamily::UniformBinary) {
  const GridSpec g(1e-3, 10.0, cells);
  SolverConfig cfg;
  return solve(InitialDensity::exponential(), product_kernel(ell), daughter(f), g, cfg);
}

// sup_{|E| <= delta} int_E f = min over levels lambda >= 0 of lambda delta + int (f - lambda)_+,
// with the minimum attained at lambda = 0 or one of the cell densities.
double ui_by_duality(const GridSpec& g, const StateVector& s, double a_cut, double delta) {
  const auto& e = g.edges();
  std::vector<double> dens, meas;
  for (std::size_t i = 0; i < g.cells() && e[i] < a_cut; ++i) {
    dens.push_back(s.counts[i] / (e[i + 1] - e[i]));
    meas.push_back(std::min(e[i + 1], a_cut) - e[i]);
  }
  std::vector<double> levels = dens;
  levels.push_back(0.0);
  double best = std::numeric_limits<double>::infinity();
  for (double lam : levels) {
    double v = lam * delta;
    for (std::size_t i = 0; i < dens.size(); ++i) v += std::max(0.0, dens[i] - lam) * meas[i];
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

TEST(Moments, DiscreteSums) {
  const GridSpec g(1.0, 4.0, 2);
  StateVector s{{1.0, 2.0}, 0.0};
  const double x0 = g.pivots()[0], x1 = g.pivots()[1];
  EXPECT_DOUBLE_EQ(moment(g, s, 0.0), 3.0);
  EXPECT_DOUBLE_EQ(moment(g, s, 1.0), x0 + 2.0 * x1);
  EXPECT_DOUBLE_EQ(moment(g, s, 2.0), x0 * x0 + 2.0 * x1 * x1);
  EXPECT_DOUBLE_EQ(weighted_moment(g, s, power_weight(2.0, 0.5)), x0 * x0 + 2.0 * x1 * x1);
}

TEST(ClosedForms, OracleAndComparisonCurves) {
  EXPECT_DOUBLE_EQ(m0_closed_form_oracle(1.0, 2.0, 1.0, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(m0_closed_form_oracle(2.0, 3.0, 1.0, 0.25), 3.0);
  // y0 = 1 + 1 * 1 / 0.5 = 3
  EXPECT_DOUBLE_EQ(riccati_bound(1.0, 1.0, 0.5, 1.0, 1.0, 0.1), 3.0 / 0.7);
  EXPECT_DOUBLE_EQ(riccati_blowup_time(1.0, 1.0, 0.5, 1.0, 1.0), 1.0 / 3.0);
  EXPECT_TRUE(std::isinf(riccati_bound(1.0, 1.0, 0.5, 1.0, 1.0, 0.5)));
  EXPECT_DOUBLE_EQ(gronwall_bound(1.0, 1.0, 0.5, 1.0, 1.0, 2.0, 0.5), 3.0 * std::exp(1.0));
  EXPECT_DOUBLE_EQ(envelope_constant(product_kernel(1.0), daughter(DaughterFamily::UniformBinary)), 2.0);
  EXPECT_DOUBLE_EQ(envelope_constant(product_kernel(1.0), daughter(DaughterFamily::PowerLaw, -0.5)), 4.0);
  EXPECT_TRUE(m0_closed_form_applicable(product_kernel(1.0), daughter(DaughterFamily::UniformBinary)));
  EXPECT_FALSE(m0_closed_form_applicable(product_kernel(0.5), daughter(DaughterFamily::UniformBinary)));
  EXPECT_THROW(m0_closed_form_oracle(product_kernel(0.5), daughter(DaughterFamily::UniformBinary),
                                     1.0, 1.0, 1.0),
               UnsupportedOperation);
}

TEST(Helpers, CumulativeTrapezoid) {
  const auto c = cumulative_trapezoid({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c[1], 0.5);
  EXPECT_DOUBLE_EQ(c[2], 2.0);
}

TEST(ReferenceRun, ConservationPositivityAndDecay) {
  const auto tr = run(120);
  const auto mass = check_mass_conservation(tr);
  EXPECT_TRUE(mass.passed) << mass.observed;
  EXPECT_LE(mass.observed, 1e-10);
  EXPECT_TRUE(check_nonnegativity(tr).passed);
  const auto decay = check_convexity_decay(tr);
  EXPECT_TRUE(decay.passed) << decay.observed;
  const double theta = 1.0 - 11.0 * std::exp(-10.0);
  const auto law = check_m0_law(tr, theta, 2.0);
  EXPECT_TRUE(law.passed) << law.observed;
}

TEST(ReferenceRun, WeightedMomentAndCollisionFunctionalBounds) {
  const auto tr = run(120, 1.0, DaughterFamily::PowerLaw);
  const auto r = check_weighted_moment_bounds(tr, power_weight(2.0, 1.0 / 3.0), product_kernel(1.0));
  ASSERT_EQ(r.checks.size(), 2u);
  for (const auto& c : r.checks) {
    EXPECT_TRUE(c.passed) << c.name << " " << c.observed << " > " << c.bound;
    EXPECT_GT(c.observed, 0.0);
  }
  // M_2(0) = 2 for e^{-x}, so the bound is 6
  EXPECT_NEAR(r.find("weighted_moment_bound")->bound, 6.0, 0.01);
}

TEST(ReferenceRun, TailEstimates) {
  const auto tr = run(120);
  const auto g = power_weight(2.0, 1.0 / 3.0);
  const auto r = tail_checks(tr, g, product_kernel(1.0), 2.0);
  ASSERT_EQ(r.checks.size(), 3u);
  EXPECT_TRUE(r.all_passed());
  EXPECT_THROW(tail_checks(tr, g, product_kernel(1.0), 1.0), DomainError);
  EXPECT_THROW(tail_checks(tr, g, product_kernel(1.0), 10.0), DomainError);
}

TEST(ReferenceRun, ZerothMomentEnvelopes) {
  const auto g = power_weight(2.0, 1.0 / 3.0);
  const auto b = daughter(DaughterFamily::UniformBinary);
  const auto super = check_zeroth_moment_envelope(run(120, 1.0), product_kernel(1.0), b, g);
  EXPECT_EQ(super.name, "gronwall_envelope");
  EXPECT_TRUE(super.passed);
  const auto sub = check_zeroth_moment_envelope(run(120, 0.25), product_kernel(0.25), b, g);
  EXPECT_EQ(sub.name, "riccati_envelope");
  EXPECT_TRUE(sub.passed);
  EXPECT_NE(sub.note.find("checkpoints used"), std::string::npos);
}

TEST(WeakForm, ResidualsOfTestFunctions) {
  const auto tr = run(120);
  const auto k = product_kernel(1.0);
  const auto b = daughter(DaughterFamily::UniformBinary);
  EXPECT_LE(weak_form_residual(tr, TestFunction::identity(), k, b), 1e-10);
  EXPECT_LE(weak_form_residual(tr, TestFunction::constant(), k, b), 1e-2);
  EXPECT_LE(weak_form_residual(tr, TestFunction::indicator(0.0, 1.0), k, b), 2e-2);
}

TEST(WeakForm, IndicatorResidualShrinksUnderRefinement) {
  const auto k = product_kernel(1.0);
  const auto b = daughter(DaughterFamily::UniformBinary);
  const auto psi = TestFunction::indicator(0.0, 1.0);
  const double r60 = weak_form_residual(run(60), psi, k, b);
  const double r120 = weak_form_residual(run(120), psi, k, b);
  const double r240 = weak_form_residual(run(240), psi, k, b);
  EXPECT_LE(r120, 0.5 * r60);
  EXPECT_LE(r240, 0.5 * r120);
}

TEST(WeakForm, TildeIsExact) {
  const auto b = daughter(DaughterFamily::UniformBinary);
  EXPECT_DOUBLE_EQ(TestFunction::constant().tilde(b, 3.0), 1.0);
  EXPECT_NEAR(TestFunction::identity().tilde(b, 3.0), 0.0, 1e-15);
  // 2 * 0.5 / 2 fragments fall in (0, 0.5); psi(2) = 0
  EXPECT_DOUBLE_EQ(TestFunction::indicator(0.0, 0.5).tilde(b, 2.0), 0.5);
}

TEST(UniformIntegrability, LimitsAndDualityOracle) {
  const auto tr = run(60);
  const auto& s = tr.checkpoints.back();
  const auto& g = tr.grid;
  EXPECT_EQ(uniform_integrability_modulus(g, s, 1.0, 0.0), 0.0);
  double below = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i)
    if (g.edges()[i + 1] <= 1.0) below += s.counts[i];
  // cells straddling a_cut contribute a fraction
  double partial = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i)
    if (g.edges()[i] < 1.0 && g.edges()[i + 1] > 1.0)
      partial = s.counts[i] * (1.0 - g.edges()[i]) / g.widths()[i];
  EXPECT_NEAR(uniform_integrability_modulus(g, s, 1.0, 5.0), below + partial, 1e-12);
  for (double d : {1e-4, 1e-3, 1e-2, 0.1, 0.5}) {
    const double greedy = uniform_integrability_modulus(g, s, 1.0, d);
    EXPECT_NEAR(greedy, ui_by_duality(g, s, 1.0, d), 1e-12 * (1.0 + greedy)) << "delta=" << d;
  }
  const double C = ui_growth_constant(tr, 1.0, {1e-3, 1e-2, 1e-1}, 1.5);
  EXPECT_TRUE(std::isfinite(C));
  EXPECT_GE(C, 0.0);
}

TEST(TimeRegularity, LipschitzQuotientIsFinite) {
  const double q = lipschitz_quotient(run(60));
  EXPECT_TRUE(std::isfinite(q));
  EXPECT_GT(q, 0.0);
}

TEST(Report, JsonEncodesNonFiniteAsStrings) {
  DiagnosticsReport r;
  r.add({"a", "x <= y", true, 1.0, std::numeric_limits<double>::infinity(), 0.0, {}});
  r.add({"b", "z", false, std::nan(""), 1.0, 0.0, "n"});
  const auto j = to_json(r);
  EXPECT_FALSE(j["all_passed"].get<bool>());
  EXPECT_EQ(j["checks"][0]["bound"], "inf");
  EXPECT_EQ(j["checks"][1]["observed"], "nan");
  EXPECT_EQ(j["checks"][1]["note"], "n");
  EXPECT_EQ(r.find("b")->passed, false);
  EXPECT_EQ(r.find("zzz"), nullptr);
}
