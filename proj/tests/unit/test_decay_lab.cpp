#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oldroyd/decay_lab.hpp"
#include "oldroyd/errors.hpp"
#include "oldroyd/linear_propagator.hpp"

using namespace oldroyd;

namespace {

const PhysParams kUnit{1.0, 1.0, 1.0, 0.0};

DecaySeries synthetic(const std::vector<double>& times, auto f) {
  DecaySeries s;
  s.times = times;
  for (double t : times) s.values.push_back(f(t));
  return s;
}

}  // namespace

TEST(Profile, GaussianMetadata) {
  const InitialProfile ic = gaussian_profile(kUnit, 1.0, 1.0, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(ic.c2, 1.0);
  EXPECT_DOUBLE_EQ(ic.r_prime, std::min(std::sqrt(std::numbers::ln2), 0.5));
  EXPECT_GE(std::abs(ic.u_hat0(ic.r_prime)), 0.5 * ic.c2);
  EXPECT_LT(std::abs(ic.u_hat0(ic.support)), 1e-29);
  EXPECT_THROW(gaussian_profile(kUnit, 1.0, 0.0, 1.0, 1.0), InvalidInput);
}

TEST(Quadrature, SigmaOnlyAtTimeZeroIsClosedForm) {
  const double a = 1.3, w = 0.7;
  const InitialProfile ic = gaussian_profile(kUnit, 0.0, 1.0, a, w);
  // 2 pi int r a^2 exp(-2 w r^2) dr = pi a^2 / (2 w)
  const double exact = a * std::sqrt(std::numbers::pi / (2.0 * w));
  EXPECT_NEAR(linear_norm_quadrature(kUnit, ic, 0, Branch::Sigma, 0.0), exact, 1e-9 * exact);
  EXPECT_EQ(linear_norm_quadrature(kUnit, ic, 0, Branch::U, 0.0), 0.0);
}

TEST(Quadrature, SigmaBranchAtTimeZeroWithDerivatives) {
  const double a = 0.8, w = 1.5;
  const InitialProfile ic = gaussian_profile(kUnit, 1.0, 1.0, a, w);
  // k = 1: 2 pi int r^3 a^2 exp(-2 w r^2) dr = 2 pi a^2 / (2 (2w)^2)
  const double exact = std::sqrt(2.0 * std::numbers::pi * a * a / (2.0 * 4.0 * w * w));
  EXPECT_NEAR(linear_norm_quadrature(kUnit, ic, 1, Branch::Sigma, 0.0), exact, 1e-9 * exact);
}

TEST(Quadrature, VanishingCouplingKeepsNormConstant) {
  const PhysParams weak{1e-8, 1.0, 1e-8, 0.0};
  const InitialProfile ic = gaussian_profile(weak, 1.0, 1.0, 0.0, 1.0);
  const double n0 = linear_norm_quadrature(weak, ic, 0, Branch::U, 0.0);
  for (double t : {1.0, 10.0, 100.0})
    EXPECT_NEAR(linear_norm_quadrature(weak, ic, 0, Branch::U, t), n0, 1e-9 * n0);
}

TEST(Quadrature, LateTimeRatioMatchesHalfPower) {
  const InitialProfile ic = gaussian_profile(kUnit, 1.0, 1.0, 0.0, 1.0);
  const double a = linear_norm_quadrature(kUnit, ic, 0, Branch::U, 1e3);
  const double b = linear_norm_quadrature(kUnit, ic, 0, Branch::U, 1e4);
  EXPECT_NEAR(b / a, std::pow(10.0, -0.5), 0.05 * std::pow(10.0, -0.5));
}

TEST(Quadrature, DoubledNodesAgree) {
  const InitialProfile ic = gaussian_profile(kUnit, 1.0, 1.0, 1.0, 1.0);
  QuadratureOptions fine;
  fine.rule = QuadratureRule::GK31;
  for (int k = 0; k <= 3; ++k) {
    for (Branch b : {Branch::U, Branch::Sigma}) {
      const double x = linear_norm_quadrature(kUnit, ic, k, b, 50.0);
      const double y = linear_norm_quadrature(kUnit, ic, k, b, 50.0, fine);
      EXPECT_NEAR(x, y, 1e-8 * y);
    }
  }
}

TEST(Quadrature, UnreachableToleranceReported) {
  const InitialProfile ic = gaussian_profile(kUnit, 1.0, 1.0, 1.0, 1.0);
  QuadratureOptions opt;
  opt.rel_tol = 1e-300;
  opt.max_depth = 0;
  try {
    linear_norm_quadrature(kUnit, ic, 2, Branch::Sigma, 3.0, opt);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_GT(e.achieved(), 0.0);
  }
  EXPECT_THROW(linear_norm_quadrature(kUnit, ic, 5, Branch::U, 1.0), InvalidInput);
  EXPECT_THROW(linear_norm_quadrature(kUnit, ic, 0, Branch::U, -1.0), InvalidInput);
}

TEST(Fit, ExactPowerLaws) {
  const std::vector<double> t = log_spaced(1e2, 1e4, 21);
  const DecayFit a = fit_decay_exponent(synthetic(t, [](double x) { return std::pow(1 + x, -0.5); }), 1e2, 1e4);
  EXPECT_NEAR(a.slope, -0.5, 1e-12);
  EXPECT_EQ(a.samples, 21);
  const DecayFit b = fit_decay_exponent(synthetic(t, [](double x) { return 3.0 * std::pow(1 + x, -2.0); }), 1e2, 1e4);
  EXPECT_NEAR(b.slope, -2.0, 1e-12);
  EXPECT_LT(b.stderr_, 1e-12);
}

TEST(Fit, RefusesShortWindow) {
  const std::vector<double> t = log_spaced(1.0, 10.0, 9);
  EXPECT_THROW(fit_decay_exponent(synthetic(t, [](double x) { return 1.0 / (1 + x); }), 1.0, 10.0),
               InvalidInput);
}

TEST(Fit, RejectsMalformedSeries) {
  DecaySeries s;
  s.times = {1.0, 2.0, 2.0};
  s.values = {1.0, 1.0, 1.0};
  EXPECT_THROW(s.validate(), InvalidInput);
  s.times = {1.0, 2.0, 3.0};
  s.values = {1.0, 0.0, 1.0};
  EXPECT_THROW(s.validate(), InvalidInput);
  s.values = {1.0, 1.0};
  EXPECT_THROW(s.validate(), InvalidInput);
}

TEST(Fit, QuadratureSlopeGradientOfVelocity) {
  const InitialProfile ic = gaussian_profile(kUnit, 1.0, 1.0, 1.0, 1.0);
  const DecaySeries s = make_decay_series(kUnit, ic, 1, Branch::U, log_spaced(1e2, 1e4, 21));
  EXPECT_NEAR(fit_decay_exponent(s, 1e2, 1e4).slope, -1.0, 0.05);
}

TEST(LowerBound, SyntheticRatios) {
  const std::vector<double> t = log_spaced(1.0, 1e4, 30);
  const auto [lo, hi] = lower_bound_ratio(synthetic(t, [](double x) { return std::pow(1 + x, -0.5); }), -0.5, 1.0);
  EXPECT_NEAR(lo, 1.0, 1e-12);
  EXPECT_NEAR(hi, 1.0, 1e-12);
  const auto [lo2, hi2] = lower_bound_ratio(
      synthetic(t, [](double x) { return 2.0 * std::pow(1 + x, -0.5) + std::pow(1 + x, -1.5); }), -0.5, 1.0);
  EXPECT_GE(lo2, 2.0);
  EXPECT_LE(hi2, 3.0);
  EXPECT_THROW(lower_bound_ratio(synthetic(t, [](double) { return 1.0; }), -0.5, 1e5), InvalidInput);
}

TEST(LowerBound, QuadratureVelocityBranch) {
  const InitialProfile ic = gaussian_profile(kUnit, 1.0, 1.0, 1.0, 1.0);
  const double t1 = constants(kUnit).t1;
  const DecaySeries s = make_decay_series(kUnit, ic, 0, Branch::U, log_spaced(t1, 1e4, 30));
  const auto [lo, hi] = lower_bound_ratio(s, -0.5, t1);
  EXPECT_GT(lo, 0.0);
  EXPECT_LE(hi / lo, 10.0);
}

TEST(Exponents, Table) {
  EXPECT_EQ(expected_exponent(Branch::U, 0), -0.5);
  EXPECT_EQ(expected_exponent(Branch::U, 3), -2.0);
  EXPECT_EQ(expected_exponent(Branch::Sigma, 0), -1.0);
  EXPECT_EQ(expected_exponent(Branch::Sigma, 3), -2.5);
  EXPECT_EQ(to_string(Branch::Sigma), "sigma");
}

TEST(LogSpaced, Endpoints) {
  const std::vector<double> t = log_spaced(1e2, 1e4, 41);
  ASSERT_EQ(t.size(), 41u);
  EXPECT_DOUBLE_EQ(t.front(), 1e2);
  EXPECT_DOUBLE_EQ(t.back(), 1e4);
  EXPECT_NEAR(t[20], 1e3, 1e-9);
}
