#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stripemin/kernel.hpp"

using namespace stripemin;

namespace {

MixtureKernel two_rate(double strength) { return MixtureKernel(strength, {{0.5, 1.0}, {0.5, 2.0}}); }

MixtureKernel random_kernel(std::mt19937& rng) {
  std::uniform_real_distribution<double> rate(0.2, 5.0), w(0.1, 1.0), lam(0.1, 4.0);
  std::uniform_int_distribution<int> count(1, 4);
  const int k = count(rng);
  std::vector<DecayComponent> comps(k);
  double total = 0.0;
  for (auto& c : comps) {
    c.rate = rate(rng);
    c.weight = w(rng);
    total += c.weight;
  }
  for (auto& c : comps) c.weight /= total;
  return MixtureKernel(lam(rng), comps);
}

}  // namespace

TEST(MixtureKernel, PointValues) {
  EXPECT_DOUBLE_EQ(MixtureKernel::exponential(2.0)(0.0), 2.0);
  EXPECT_NEAR(MixtureKernel::exponential(2.0)(1.0), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(two_rate(1.0)(1.0), 0.5 * std::exp(-1.0) + 0.5 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(two_rate(1.0)(1.0), 0.251607, 1e-6);
}

TEST(MixtureKernel, IsEven) {
  const auto v = two_rate(1.3);
  for (double x : {0.1, 0.7, 3.0, 12.0}) EXPECT_EQ(v(x), v(-x));
}

TEST(MixtureKernel, TotalIntegral) {
  EXPECT_DOUBLE_EQ(MixtureKernel::exponential(1.0).total_integral(), 2.0);
  EXPECT_DOUBLE_EQ(MixtureKernel::exponential(1.5).total_integral(), 3.0);
  EXPECT_DOUBLE_EQ(two_rate(1.0).total_integral(), 1.5);
  const auto v = two_rate(0.8);
  const double numeric = 2.0 * oracle::simpson([&](double x) { return v(x); }, 0.0, 60.0, 60000);
  EXPECT_NEAR(v.total_integral(), numeric, 1e-9);
}

TEST(MixtureKernel, ZeroStrengthAllowed) {
  const auto v = MixtureKernel::exponential(0.0);
  EXPECT_EQ(v(0.3), 0.0);
  EXPECT_EQ(v.total_integral(), 0.0);
}

TEST(MixtureKernel, RejectsBadInput) {
  EXPECT_THROW(MixtureKernel(1.0, {}), std::invalid_argument);
  EXPECT_THROW(MixtureKernel(-1.0, {{1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(MixtureKernel(1.0, {{0.6, 1.0}, {0.6, 2.0}}), std::invalid_argument);
  EXPECT_THROW(MixtureKernel(1.0, {{1.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(MixtureKernel(1.0, {{1.0, -2.0}}), std::invalid_argument);
  EXPECT_THROW(MixtureKernel(1.0, {{1.5, 1.0}, {-0.5, 2.0}}), std::invalid_argument);
}

TEST(MixtureKernel, CompletelyMonotone) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_kernel(rng);
    for (int n = 0; n <= 3; ++n)
      for (double x : {0.1, 1.0, 5.0}) EXPECT_GE((n % 2 ? -1.0 : 1.0) * v.derivative(n, x), 0.0);
  }
}

TEST(MixtureKernel, DerivativeMatchesFiniteDifference) {
  const auto v = two_rate(1.7);
  const double x = 0.9, s = 1e-5;
  EXPECT_NEAR(v.derivative(1, x), (v(x + s) - v(x - s)) / (2 * s), 1e-8);
  EXPECT_NEAR(v.derivative(2, x), (v.derivative(1, x + s) - v.derivative(1, x - s)) / (2 * s), 1e-8);
}

TEST(PowerLaw, DegenerateRangeGivesSingleExponential) {
  const auto v = power_law_approximation(1.0, 2.0, 1, 1.0, 1.0);
  ASSERT_EQ(v.components().size(), 1u);
  EXPECT_DOUBLE_EQ(v.components()[0].rate, 1.0);
  EXPECT_DOUBLE_EQ(v.components()[0].weight, 1.0);
}

TEST(PowerLaw, WeightsNormalized) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto v = power_law_approximation(1.0, p, 40, 0.1, 10.0);
    double total = 0.0;
    for (const auto& c : v.components()) total += c.weight;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(PowerLaw, InverseSquareTail) {
  const auto v = power_law_approximation(1.0, 2.0, 40, 0.1, 10.0);
  std::vector<double> xs;
  for (int k = 0; k <= 40; ++k) xs.push_back(0.5 * std::pow(10.0, k / 40.0));
  const auto fit = oracle::fit_inverse_square(v, xs);
  EXPECT_GT(fit.c, 0.0);
  EXPECT_LT(fit.worst_relative, 0.25);
}

TEST(PowerLaw, RejectsBadInput) {
  EXPECT_THROW(power_law_approximation(1.0, 1.0, 10, 0.1, 10.0), std::invalid_argument);
  EXPECT_THROW(power_law_approximation(1.0, 2.0, 0, 0.1, 10.0), std::invalid_argument);
  EXPECT_THROW(power_law_approximation(1.0, 2.0, 10, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(power_law_approximation(1.0, 2.0, 10, 1.0, 1.0), std::invalid_argument);
}

TEST(PeriodizedKernel, ClosedFormValue) {
  const PeriodizedKernel vt(MixtureKernel::exponential(1.0), 1.0);
  const double expected = 1.0 / std::tanh(1.0) - 1.0 / std::sinh(1.0);
  EXPECT_NEAR(vt.evaluate(0.5, 0.5), expected, 1e-12);
  EXPECT_NEAR(vt.evaluate(0.5, 0.5), 0.46212, 1e-5);
  EXPECT_NEAR(vt.evaluate(0.5, 0.5), oracle::periodized_by_images(MixtureKernel::exponential(1.0), 1.0, 0.5, 0.5),
              1e-12);
}

TEST(PeriodizedKernel, VanishesAtWall) {
  const PeriodizedKernel vt(two_rate(2.0), 3.0);
  for (double y : {0.0, 0.4, 1.5, 2.9, 3.0}) EXPECT_EQ(vt.evaluate(0.0, y), 0.0);
}

TEST(PeriodizedKernel, LargePeriodReducesToHalfLine) {
  const PeriodizedKernel vt(MixtureKernel::exponential(1.0), 50.0);
  EXPECT_NEAR(vt.evaluate(1.0, 2.0), std::exp(-1.0) - std::exp(-3.0), 1e-12);
  EXPECT_NEAR(vt.evaluate(1.0, 2.0), 0.31809, 1e-5);
}

TEST(PeriodizedKernel, AgreesWithImageSum) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_kernel(rng);
    for (double T : {0.5, 1.0, 10.0}) {
      const PeriodizedKernel vt(v, T);
      const int N = 50;
      const double a = v.min_rate();
      const double bound = v(0.0) * std::exp(-a * 2.0 * T * N) / (1.0 - std::exp(-2.0 * a * T));
      for (int k = 0; k < 10; ++k) {
        const double x = T * unit(rng), y = T * unit(rng);
        EXPECT_LE(std::abs(vt.evaluate(x, y) - oracle::periodized_by_images(v, T, x, y, N)), bound + 1e-13);
      }
    }
  }
}

TEST(PeriodizedKernel, PositiveOnInterior) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_kernel(rng);
    for (double T : {0.5, 1.0, 10.0}) {
      const PeriodizedKernel vt(v, T);
      for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 20; ++j) EXPECT_GT(vt.evaluate(i * T / 21.0, j * T / 21.0), 0.0);
    }
  }
}

TEST(PeriodizedKernel, Symmetries) {
  const PeriodizedKernel vt(two_rate(1.2), 2.5);
  for (double x : {0.1, 0.9, 1.7})
    for (double y : {0.3, 1.25, 2.4}) {
      EXPECT_EQ(vt.evaluate(x, y), vt.evaluate(y, x));
      EXPECT_NEAR(vt.evaluate(x, y), vt.evaluate(2.5 - x, 2.5 - y), 1e-14);
    }
}

TEST(PeriodizedKernel, RejectsOutsideInterval) {
  const PeriodizedKernel vt(two_rate(1.0), 1.0);
  EXPECT_THROW(vt.evaluate(-0.1, 0.5), std::out_of_range);
  EXPECT_THROW(vt.evaluate(0.5, 1.1), std::out_of_range);
  EXPECT_THROW(PeriodizedKernel(two_rate(1.0), 0.0), std::invalid_argument);
}

TEST(PeriodizedGridOperator, MatchesDenseProduct) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto v = random_kernel(rng);
    const double T = 0.5 + 4.0 * std::abs(unit(rng));
    const std::size_t n = 37;
    const PeriodizedGridOperator op(v, T, n);
    const PeriodizedKernel vt(v, T);
    const double h = T / (n + 1);
    std::vector<double> f(n);
    for (auto& x : f) x = unit(rng);
    const auto out = op.apply(f);
    for (std::size_t i = 0; i < n; ++i) {
      double dense = 0.0;
      for (std::size_t j = 0; j < n; ++j) dense += vt.evaluate((i + 1) * h, (j + 1) * h) * f[j];
      EXPECT_NEAR(out[i], dense, 1e-12 * (1.0 + std::abs(dense)));
    }
  }
}
