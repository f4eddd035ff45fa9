#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "nlbe/daughter.hpp"

using namespace nlbe;

namespace {

DaughterSpec power_law(double nu, double p = 1.5, double size_bound = 10.0) {
  DaughterSpec::Options o;
  o.nu = nu;
  o.p = p;
  o.size_bound = size_bound;
  return DaughterSpec(DaughterFamily::PowerLaw, o);
}

DaughterSpec make(DaughterFamily f, double size_bound = 10.0) {
  DaughterSpec::Options o;
  o.size_bound = size_bound;
  return DaughterSpec(f, o);
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(lo * std::pow(hi / lo, i / double(count - 1)));
  return v;
}

const DaughterFamily kAll[] = {DaughterFamily::PowerLaw, DaughterFamily::UniformBinary,
                               DaughterFamily::KLLUnitEnds, DaughterFamily::KLLShrinkingEnds};

}  // namespace

TEST(DaughterEval, CatalogValues) {
  EXPECT_DOUBLE_EQ(power_law(0.0)(0.5, 1.0, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(make(DaughterFamily::UniformBinary)(1.0, 4.0, 7.0), 0.5);
  EXPECT_EQ(make(DaughterFamily::KLLUnitEnds)(1.5, 3.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(make(DaughterFamily::KLLUnitEnds)(0.5, 3.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(make(DaughterFamily::KLLShrinkingEnds)(0.1, 3.0, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(make(DaughterFamily::KLLShrinkingEnds)(1.0, 1.2, 1.0), 2.0 / 1.2);
}

TEST(DaughterEval, SupportBelowParent) {
  for (auto f : kAll) {
    const auto b = make(f);
    for (double y : {0.01, 0.5, 1.7, 4.0})
      for (double x : {y * 1.0001, y * 2.0, y + 5.0}) ASSERT_EQ(b(x, y, 1.0), 0.0);
  }
}

TEST(DaughterEval, RejectsNonPositiveArguments) {
  const auto b = make(DaughterFamily::UniformBinary);
  EXPECT_THROW(b(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(b(0.5, -1.0, 1.0), DomainError);
  EXPECT_THROW(b(0.5, 1.0, 0.0), DomainError);
  EXPECT_THROW(power_law(-1.0), DomainError);
  EXPECT_THROW(power_law(0.1), DomainError);
  EXPECT_THROW(power_law(0.0, 2.0), DomainError);
}

TEST(LocalMass, CatalogExamples) {
  const double y2[] = {2.0};
  const double z1[] = {1.0};
  const auto pl = check_lmc(power_law(-0.5), y2, z1, 1e-8);
  EXPECT_TRUE(pl.passed);
  EXPECT_LE(pl.worst, 1e-12);

  // int_0^4 x (2/4) dx = 4 and int_0^1 x dx + int_2^3 x dx = 0.5 + 2.5 = 3
  EXPECT_DOUBLE_EQ(make(DaughterFamily::UniformBinary).partial_moment(1.0, 0.0, 4.0, 4.0), 4.0);
  EXPECT_DOUBLE_EQ(make(DaughterFamily::KLLUnitEnds).partial_moment(1.0, 0.0, 3.0, 3.0), 0.5 + 2.5);
}

TEST(LocalMass, AllFamiliesOnTwentyByTwentyGrid) {
  const auto ys = log_grid(1e-3, 10.0, 20);
  const auto zs = log_grid(1e-3, 10.0, 20);
  for (auto f : kAll) {
    const auto r = check_lmc(make(f), ys, zs, 1e-8);
    EXPECT_TRUE(r.passed) << daughter_name(f) << " worst " << r.worst << " " << r.detail;
  }
  for (double nu : {-0.25, -0.5, -0.9}) {
    const auto r = check_lmc(power_law(nu), ys, zs, 1e-8);
    EXPECT_TRUE(r.passed) << "nu=" << nu << " worst " << r.worst;
  }
}

TEST(LocalMass, PartialMomentMatchesIndependentQuadrature) {
  const auto b = power_law(-0.3);
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (double y : {0.3, 2.0, 7.5}) {
    const double lo = 0.2 * y, hi = 0.9 * y;
    for (double k : {0.0, 1.0, 2.0}) {
      const double ref = GK::integrate([&](double x) { return std::pow(x, k) * b(x, y, 1.0); },
                                       lo, hi, 0, 1e-15);
      EXPECT_NEAR(b.partial_moment(k, lo, hi, y), ref, 1e-13 * std::abs(ref));
    }
  }
}

TEST(FragmentCount, ClosedForms) {
  EXPECT_DOUBLE_EQ(fragment_count(power_law(0.0), 3.7, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(fragment_count(power_law(-0.5), 0.3, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(power_law(-0.5).beta0(), 3.0);
  EXPECT_DOUBLE_EQ(fragment_count(make(DaughterFamily::KLLUnitEnds), 5.0, 1.0), 2.0);
}

TEST(FragmentCount, BoundHoldsWithEqualityForBinaryFamilies) {
  const auto ys = log_grid(1e-3, 10.0, 20);
  for (auto f : kAll) {
    const auto b = make(f);
    const auto r = check_nop(b, ys, ys);
    EXPECT_TRUE(r.passed) << daughter_name(f);
    EXPECT_GE(b.beta0(), 2.0);
  }
  for (double y : ys) {
    EXPECT_NEAR(fragment_count(power_law(0.0), y, 1.0), 2.0, 1e-14);
    EXPECT_NEAR(fragment_count(make(DaughterFamily::UniformBinary), y, 1.0), 2.0, 1e-14);
  }
}

TEST(FragmentCount, Beta0Override) {
  DaughterSpec::Options o;
  o.beta0 = 2.5;
  EXPECT_DOUBLE_EQ(DaughterSpec(DaughterFamily::UniformBinary, o).beta0(), 2.5);
  o.beta0 = 1.5;
  EXPECT_THROW(DaughterSpec(DaughterFamily::UniformBinary, o), DomainError);
  DaughterSpec::Options q;
  q.nu = -0.5;
  q.beta0 = 2.5;  // below the sharp value 3
  EXPECT_THROW(DaughterSpec(DaughterFamily::PowerLaw, q), DomainError);
}

TEST(PCondition, PowerLawClosedForm) {
  const double ys[] = {0.01, 1.0, 9.0};
  const double z1[] = {1.0};
  const auto r = check_p_condition(power_law(0.0), 1.5, ys, z1);
  EXPECT_TRUE(r.verifiable);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.Bp_observed, std::pow(2.0, 2.5), 1e-9);
}

TEST(PCondition, UniformBinaryAtUnitSize) {
  const double y1[] = {1.0};
  const auto r = check_p_condition(make(DaughterFamily::UniformBinary), 1.5, y1, y1);
  EXPECT_DOUBLE_EQ(r.Bp_observed, std::pow(2.0, 2.5));
}

TEST(PCondition, KllUnitEndsExactPieces) {
  // int b^p = |(0,1)| + |(3,4)| = 2, so 2 * 4^{1/2} * 2 = 8
  const double y4[] = {4.0};
  const double z1[] = {1.0};
  const auto r = check_p_condition(make(DaughterFamily::KLLUnitEnds), 1.5, y4, z1);
  EXPECT_DOUBLE_EQ(r.Bp_observed, 8.0);
  EXPECT_TRUE(r.passed);
}

TEST(PCondition, ConvergenceDomainOfPowerLaw) {
  const double y1[] = {1.0};
  // nu p = -0.95 > -1
  const auto ok = check_p_condition(power_law(-0.5, 1.9), 1.9, y1, y1);
  EXPECT_TRUE(ok.verifiable);
  // nu p = -1.14 <= -1
  const auto bad = check_p_condition(power_law(-0.6, 1.9), 1.9, y1, y1);
  EXPECT_FALSE(bad.verifiable);
  EXPECT_FALSE(bad.passed);
}

TEST(PCondition, AllFamiliesOnBoundedSizes) {
  const auto ys = log_grid(1e-3, 10.0, 20);
  for (auto f : kAll) {
    const auto b = make(f, 10.0);
    const auto r = check_p_condition(b, 1.5, ys, ys);
    EXPECT_TRUE(r.passed) << daughter_name(f) << " observed " << r.Bp_observed << " bound "
                          << r.Bp_bound;
  }
  // growth in y: 4 y^{p-1} and 4 y^{2p-2} at the size bound
  EXPECT_DOUBLE_EQ(make(DaughterFamily::KLLUnitEnds, 10.0).Bp(), 4.0 * std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(make(DaughterFamily::KLLShrinkingEnds, 10.0).Bp(), 4.0 * 10.0);
}

TEST(Sampling, FragmentsSumExactly) {
  const auto b = make(DaughterFamily::UniformBinary);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logy(-6.0, 2.0);
  for (int i = 0; i < 100000; ++i) {
    const double y = std::pow(10.0, logy(rng));
    const auto f = sample_fragments(b, y, 1.0, rng);
    ASSERT_EQ(f.size(), 2u);
    ASSERT_GT(f[0], 0.0);
    ASSERT_GT(f[1], 0.0);
    ASSERT_EQ(f[0] + f[1], y);
    // exact real sum: the rounding error of f0 + f1 is zero
    const double s = f[0] + f[1];
    const double bb = s - f[0];
    ASSERT_EQ((f[0] - (s - bb)) + (f[1] - bb), 0.0);
  }
  std::mt19937_64 r2(1);
  const auto two = sample_fragments(b, 2.0, 1.0, r2);
  EXPECT_EQ(two[0] + two[1], 2.0);
}

TEST(Sampling, FragmentDensityMatchesUniformBinary) {
  const auto b = make(DaughterFamily::UniformBinary);
  std::mt19937_64 rng(20240611);
  const int bins = 18;  // (0.05, 0.95) in width-0.05 bins
  std::vector<double> hist(bins, 0.0);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i)
    for (double x : sample_fragments(b, 1.0, 1.0, rng)) {
      const int k = static_cast<int>((x - 0.05) / 0.05);
      if (x > 0.05 && x < 0.95 && k >= 0 && k < bins) hist[k] += 1.0;
    }
  for (double h : hist) EXPECT_NEAR(h / (draws * 0.05), 2.0, 0.02);
}

TEST(Sampling, NonSamplableFamiliesRefuse) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_fragments(power_law(-0.5), 1.0, 1.0, rng), UnsupportedOperation);
  EXPECT_THROW(sample_fragments(make(DaughterFamily::KLLUnitEnds), 1.0, 1.0, rng),
               UnsupportedOperation);
}
