#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oldroyd/errors.hpp"
#include "oldroyd/spectral_ops.hpp"
#include "oldroyd/transform.hpp"
#include "test_util.hpp"

using namespace oldroyd;
using testutil::max_abs;
using testutil::max_abs_diff;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t mode(const Grid& g, int fx, int fy) {
  const int n = g.n();
  return g.index((fx + n) % n, (fy + n) % n);
}

}  // namespace

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(Grid(7, 1.0), InvalidInput);
  EXPECT_THROW(Grid(6, 1.0), InvalidInput);
  EXPECT_THROW(Grid(16, 0.0), InvalidInput);
  EXPECT_THROW(Grid(16, -1.0), InvalidInput);
}

TEST(Grid, FrequencyLayout) {
  const Grid g(16, kTwoPi);
  EXPECT_EQ(g.signed_freq(0), 0);
  EXPECT_EQ(g.signed_freq(8), 8);
  EXPECT_EQ(g.signed_freq(9), -7);
  EXPECT_EQ(g.signed_freq(15), -1);
  EXPECT_DOUBLE_EQ(g.k0(), 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g.conjugate_index(g.conjugate_index(i)), i);
    if (g.on_nyquist(i)) continue;
    const std::size_t c = g.conjugate_index(i);
    EXPECT_DOUBLE_EQ(g.kx()[c], -g.kx()[i]);
    EXPECT_DOUBLE_EQ(g.ky()[c], -g.ky()[i]);
  }
}

TEST(Transform, ConstantFieldIsMeanMode) {
  const Grid g(16, 3.0);
  Transform fft(g);
  std::vector<double> one(g.size(), 1.0);
  const Spectrum s = fft.forward(one);
  EXPECT_NEAR(s[0].real(), 1.0, 1e-15);
  EXPECT_NEAR(s[0].imag(), 0.0, 1e-15);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(std::abs(s[i]), 1e-15);
  const std::vector<double> back = fft.inverse(s);
  for (double v : back) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(Transform, SingleCosineHasTwoHalfModes) {
  const Grid g(32, 5.0);
  Transform fft(g);
  std::vector<double> f(g.size());
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) f[g.index(j, k)] = std::cos(kTwoPi * j / g.n());
  const Spectrum s = fft.forward(f);
  EXPECT_NEAR(std::abs(s[mode(g, 1, 0)] - Complex(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[mode(g, -1, 0)] - Complex(0.5)), 0.0, 1e-15);
  const std::vector<double> back = fft.inverse(s);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(back[i], f[i], 1e-14);
}

TEST(Transform, RandomRoundtripAndHermitian) {
  const Grid g(32, 1.0);
  Transform fft(g);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> f(g.size());
  for (double& v : f) v = normal(rng);
  const Spectrum s = fft.forward(f);
  EXPECT_EQ(hermitian_defect(s, g), 0.0);
  const std::vector<double> back = fft.inverse(s);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    err = std::max(err, std::abs(back[i] - f[i]));
    ref = std::max(ref, std::abs(f[i]));
  }
  EXPECT_LT(err / ref, 1e-12);
}

TEST(Transform, DimensionMismatchRejected) {
  const Grid g(16, 1.0);
  Transform fft(g);
  std::vector<double> wrong(10);
  Spectrum out(g.size());
  EXPECT_THROW(fft.forward(wrong, out), InvalidInput);
  std::vector<double> phys(g.size());
  Spectrum bad(5);
  EXPECT_THROW(fft.inverse(bad, phys), InvalidInput);
}

TEST(Parseval, HundredRandomFields) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 16 << (trial % 3);
    const Grid g(n, 1.0 + 0.1 * trial);
    Transform fft(g);
    std::vector<double> f(g.size());
    for (double& v : f) v = normal(rng);
    const double phys = physical_l2_norm(f, g);
    const double spec = sobolev_norm(fft.forward(f), g, 0);
    if (std::abs(phys - spec) > 1e-12 * phys) ++failures;
  }
  EXPECT_EQ(failures, 0);
}

TEST(Leray, AnnihilatesGradients) {
  const Grid g(16, kTwoPi);
  SpectralVectorField v(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    v.comp[0][i] = g.kx()[i];
    v.comp[1][i] = g.ky()[i];
  }
  const SpectralVectorField p = leray_project(v);
  EXPECT_LT(max_abs(p.comp[0]), 1e-15);
  EXPECT_LT(max_abs(p.comp[1]), 1e-15);
}

TEST(Leray, DivergenceFreeFieldIsFixed) {
  const Grid g(16, kTwoPi);
  SpectralVectorField v(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    v.comp[0][i] = -g.ky()[i];
    v.comp[1][i] = g.kx()[i];
  }
  const SpectralVectorField p = leray_project(v);
  EXPECT_LT(max_abs_diff(p.comp[0], v.comp[0]), 1e-15);
  EXPECT_LT(max_abs_diff(p.comp[1], v.comp[1]), 1e-15);
}

TEST(Leray, HandEvaluatedModes) {
  const Grid g(16, 3.0);
  SpectralVectorField v(g);
  const std::size_t ax = mode(g, 1, 0), ay = mode(g, 0, 1);
  v.comp[0][ax] = 1.0;
  v.comp[0][ay] = 1.0;
  const SpectralVectorField p = leray_project(v);
  EXPECT_EQ(p.comp[0][ax], Complex(0.0));
  EXPECT_EQ(p.comp[1][ax], Complex(0.0));
  EXPECT_EQ(p.comp[0][ay], Complex(1.0));
  EXPECT_EQ(p.comp[1][ay], Complex(0.0));
}

TEST(Leray, MeanModePassesThrough) {
  const Grid g(16, 1.0);
  SpectralVectorField v(g);
  v.comp[0][0] = Complex(2.0, -1.0);
  v.comp[1][0] = Complex(0.5, 0.0);
  const SpectralVectorField p = leray_project(v);
  EXPECT_EQ(p.comp[0][0], v.comp[0][0]);
  EXPECT_EQ(p.comp[1][0], v.comp[1][0]);
}

TEST(Leray, RandomIdempotentContractiveDivergenceFree) {
  std::mt19937_64 rng(11);
  for (int n : {16, 32, 64}) {
    const Grid g(n, 2.5);
    const SpectralVectorField v = testutil::random_vector(g, rng);
    const SpectralVectorField p = leray_project(v);
    const SpectralVectorField pp = leray_project(p);
    EXPECT_LT(max_abs_diff(pp.comp[0], p.comp[0]), 1e-15 * (1.0 + max_abs(p.comp[0])));
    EXPECT_LT(max_abs_diff(pp.comp[1], p.comp[1]), 1e-15 * (1.0 + max_abs(p.comp[1])));
    EXPECT_TRUE(is_divergence_free(p));
    EXPECT_LE(sobolev_norm(p, 0), sobolev_norm(v, 0));
  }
}

TEST(LambdaPower, IdentityAndMultiplier) {
  const Grid g(16, kTwoPi);
  Spectrum f(g.size());
  f[mode(g, 3, 0)] = 1.0;
  EXPECT_EQ(lambda_power(f, g, 0.0), f);
  const Spectrum sq = lambda_power(f, g, 2.0);
  EXPECT_NEAR(sq[mode(g, 3, 0)].real(), 9.0, 1e-13);
}

TEST(LambdaPower, NegativeThenPositiveRoundtrip) {
  const Grid g(32, 4.0);
  std::mt19937_64 rng(5);
  Spectrum f = testutil::random_spectrum(g, rng);
  f[0] = 0.0;
  const Spectrum back = lambda_power(lambda_power(f, g, -1.0), g, 1.0);
  EXPECT_LT(max_abs_diff(back, f), 1e-12 * max_abs(f));
}

TEST(LambdaPower, NegativePowerOnNonzeroMeanRefused) {
  const Grid g(16, 1.0);
  Spectrum f(g.size());
  f[0] = 1.0;
  EXPECT_THROW(lambda_power(f, g, -1.0), ZeroModeSingularity);
  EXPECT_EQ(lambda_power(f, g, 1.0)[0], Complex(0.0));
}

TEST(Sigma, IdentityStressGivesZero) {
  const Grid g(16, kTwoPi);
  SymmetricTensorField t(g);
  const std::size_t i = mode(g, 1, 0);
  t.comp[0][i] = 1.0;
  t.comp[2][i] = 1.0;
  const SpectralVectorField s = sigma_from_tau(t);
  EXPECT_LT(std::abs(s.comp[0][i]), 1e-15);
  EXPECT_LT(std::abs(s.comp[1][i]), 1e-15);
}

TEST(Sigma, OffDiagonalStress) {
  const Grid g(16, kTwoPi);
  SymmetricTensorField t(g);
  const std::size_t i = mode(g, 1, 0);
  t.comp[1][i] = 1.0;
  const SpectralVectorField s = sigma_from_tau(t);
  EXPECT_LT(std::abs(s.comp[0][i]), 1e-15);
  EXPECT_LT(std::abs(s.comp[1][i] - Complex(0.0, 1.0)), 1e-15);
}

TEST(Sigma, ZeroStressAndRandomBounds) {
  std::mt19937_64 rng(3);
  const Grid g(32, 2.0);
  const SpectralVectorField z = sigma_from_tau(SymmetricTensorField(g));
  EXPECT_EQ(max_abs(z.comp[0]), 0.0);
  EXPECT_EQ(max_abs(z.comp[1]), 0.0);

  const SymmetricTensorField t = testutil::random_tensor(g, rng);
  const SpectralVectorField s = sigma_from_tau(t);
  EXPECT_TRUE(is_divergence_free(s));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double sn = std::norm(s.comp[0][i]) + std::norm(s.comp[1][i]);
    double tn = 0.0;
    for (int c = 0; c < 3; ++c) tn += SymmetricTensorField::kWeight[c] * std::norm(t.comp[c][i]);
    EXPECT_LE(sn, tn * (1.0 + 1e-14));
  }
}

TEST(Cutoff, PlateauSupportMonotone) {
  const FrequencyCutoff phi(0.5);
  EXPECT_EQ(phi(0.0), 1.0);
  EXPECT_EQ(phi(0.25), 1.0);
  EXPECT_EQ(phi(0.5), 0.0);
  EXPECT_EQ(phi(3.0), 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = phi(0.6 * i / 1000.0);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_LE(v, prev);
    prev = v;
  }
  EXPECT_THROW(FrequencyCutoff(0.0), InvalidInput);
}

TEST(Cutoff, SplitExamples) {
  const Grid g(64, kTwoPi * 16.0);  // k0 = 1/16
  const double R = 0.5;
  const FrequencyCutoff cut(R);
  auto single = [&](int fx) {
    Spectrum f(g.size());
    f[mode(g, fx, 0)] = Complex(1.0, 2.0);
    return f;
  };
  // |xi| = R/4 -> entirely low
  {
    const Spectrum f = single(2);
    const auto [lo, hi] = freq_split(f, g, cut);
    EXPECT_EQ(lo, f);
    EXPECT_EQ(max_abs(hi), 0.0);
  }
  // |xi| = 2R -> entirely high
  {
    const Spectrum f = single(16);
    const auto [lo, hi] = freq_split(f, g, cut);
    EXPECT_EQ(max_abs(lo), 0.0);
    EXPECT_EQ(hi, f);
  }
  // |xi| = 3R/4 -> bridge weights
  {
    const Spectrum f = single(6);
    const auto [lo, hi] = freq_split(f, g, cut);
    const double r = 0.375;
    const double a = std::exp(-1.0 / (R - r)), b = std::exp(-1.0 / (r - R / 2));
    const double w = a / (a + b);
    const std::size_t i = mode(g, 6, 0);
    EXPECT_NEAR(std::abs(lo[i] - w * f[i]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(hi[i] - (1.0 - w) * f[i]), 0.0, 1e-15);
  }
}

TEST(Cutoff, PartitionOfUnityRandom) {
  std::mt19937_64 rng(99);
  const Grid g(64, kTwoPi * 8.0);
  const FrequencyCutoff cut(1.3);
  for (int trial = 0; trial < 10; ++trial) {
    const Spectrum f = testutil::random_spectrum(g, rng);
    const auto [lo, hi] = freq_split(f, g, cut);
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_LE(std::abs(lo[i] + hi[i] - f[i]), 1e-15 * std::max(1.0, std::abs(f[i])));
      if (g.kmag()[i] >= 1.3) EXPECT_EQ(lo[i], Complex(0.0));
      if (g.kmag()[i] <= 0.65) EXPECT_EQ(hi[i], Complex(0.0));
    }
  }
}

TEST(Sobolev, SingleModeAndZero) {
  const Grid g(16, kTwoPi);
  Spectrum f(g.size());
  f[mode(g, 2, 0)] = 1.0;
  // Norms carry the torus area, so a unit coefficient has L2 norm L.
  EXPECT_NEAR(sobolev_norm(f, g, 1), 2.0 * g.length(), 1e-12);
  EXPECT_EQ(sobolev_norm(Spectrum(g.size()), g, 3), 0.0);
  EXPECT_THROW(sobolev_norm(f, g, 5), InvalidInput);
  EXPECT_THROW(sobolev_norm(f, g, -1), InvalidInput);
}

TEST(Sobolev, FullNormIsSumOfPieces) {
  std::mt19937_64 rng(8);
  const Grid g(32, 3.0);
  const Spectrum f = testutil::random_spectrum(g, rng);
  const double full = sobolev_norm_full(f, g, 1);
  const double a = sobolev_norm(f, g, 0), b = sobolev_norm(f, g, 1);
  EXPECT_NEAR(full * full, a * a + b * b, 1e-12 * full * full);
}

TEST(Sobolev, MonotoneInKAwayFromUnitCircle) {
  std::mt19937_64 rng(21);
  const Grid g(32, kTwoPi / 4.0);  // k0 = 4 > 1: every nonzero mode has |xi| >= 1
  Spectrum f = testutil::random_spectrum(g, rng);
  for (int k = 0; k < 4; ++k) EXPECT_LE(sobolev_norm(f, g, k), sobolev_norm(f, g, k + 1));

  const Grid h(32, kTwoPi * 64.0);  // k0 = 1/64, |xi| <= 0.25 < 1
  Spectrum q = testutil::random_spectrum(h, rng);
  for (int k = 0; k < 4; ++k) EXPECT_GE(sobolev_norm(q, h, k), sobolev_norm(q, h, k + 1));
}

TEST(PairwiseSum, AccurateAndOrderFixed) {
  std::vector<double> v(1 << 16, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 6553.6, 1e-9);
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(v));
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}
