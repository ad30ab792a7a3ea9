#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stripemin/local_term.hpp"

using namespace stripemin;

TEST(LocalTerm, PointValues) {
  EXPECT_EQ(LocalTerm::quartic().value(1.0), 0.0);
  EXPECT_EQ(LocalTerm::quartic().value(0.0), 1.0);
  EXPECT_EQ(LocalTerm::vee().value(0.0), 1.0);
  EXPECT_EQ(LocalTerm::vee().value(1.0), 0.0);
  EXPECT_NEAR(LocalTerm::entropy(1.0).value(1.0), 0.0, 1e-15);
}

TEST(LocalTerm, Derivatives) {
  EXPECT_DOUBLE_EQ(LocalTerm::quartic().derivative_pos(0.5), -1.5);
  EXPECT_DOUBLE_EQ(LocalTerm::vee().derivative_pos(0.25), -1.5);
  EXPECT_DOUBLE_EQ(LocalTerm::vee().derivative_pos(1.0), 0.0);
  EXPECT_THROW(LocalTerm::vee().derivative_pos(0.0), std::domain_error);
  EXPECT_THROW(LocalTerm::vee().derivative_pos(-0.5), std::domain_error);
}

TEST(LocalTerm, EntropyMinimumAtOne) {
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto F = LocalTerm::entropy(beta);
    EXPECT_NEAR(F.value(1.0), 0.0, 1e-14);
    EXPECT_GE(F.value(0.5), 0.0);
    EXPECT_GE(F.value(1.05), 0.0);
  }
}

TEST(LocalTerm, EntropyInfiniteOutsideDomain) {
  const auto F = LocalTerm::entropy(0.5);
  const double edge = 1.0 / std::tanh(0.5);
  EXPECT_TRUE(std::isinf(F.value(edge)));
  EXPECT_TRUE(std::isinf(F.value(-edge - 1.0)));
  EXPECT_EQ(F.bounded_value(edge), kInfiniteEnergySentinel);
  EXPECT_TRUE(std::isfinite(F.value(0.99 * edge)));
}

TEST(LocalTerm, Even) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> t(-1.5, 1.5);
  for (const auto& F : {LocalTerm::quartic(), LocalTerm::vee(), LocalTerm::entropy(1.0)})
    for (int k = 0; k < 100; ++k) {
      const double x = t(rng);
      EXPECT_EQ(F.value(x), F.value(-x));
    }
}

TEST(LocalTerm, DerivativeMatchesFiniteDifference) {
  for (const auto& F : {LocalTerm::quartic(), LocalTerm::vee(), LocalTerm::entropy(1.0), LocalTerm::entropy(3.0)})
    for (int k = 1; k <= 9; ++k) {
      const double t = 0.1 * k, s = 1e-6;
      const double fd = (F.value(t + s) - F.value(t - s)) / (2 * s);
      EXPECT_NEAR(F.derivative_pos(t), fd, 1e-6 * std::max(1.0, std::abs(fd))) << to_string(F.variant()) << " t=" << t;
    }
}

TEST(LocalTerm, CurvatureMatchesFiniteDifference) {
  for (const auto& F : {LocalTerm::quartic(), LocalTerm::vee(), LocalTerm::entropy(1.0)})
    for (double t : {0.2, 0.5, 0.8}) {
      const double s = 1e-5;
      EXPECT_NEAR(F.curvature_pos(t), (F.derivative_pos(t + s) - F.derivative_pos(t - s)) / (2 * s), 1e-6);
    }
}

TEST(LocalTerm, SlopeIsOddExtension) {
  const auto F = LocalTerm::vee();
  EXPECT_EQ(F.slope(0.0), -2.0);
  EXPECT_EQ(F.slope(-0.3), -F.slope(0.3));
}

namespace {

bool has_concave_triple(const LocalTerm& F) {
  for (int i = 1; i < 200; ++i) {
    const double t = 0.005 * i, d = 0.005;
    if (F.value(t - d) + F.value(t + d) - 2.0 * F.value(t) < -1e-14) return true;
  }
  return false;
}

}  // namespace

TEST(LocalTerm, ConvexityFlags) {
  EXPECT_TRUE(LocalTerm::vee().convex_on_positive());
  EXPECT_FALSE(has_concave_triple(LocalTerm::vee()));

  EXPECT_FALSE(LocalTerm::quartic().convex_on_positive());
  const auto Q = LocalTerm::quartic();
  EXPECT_LT(Q.value(0.2) + Q.value(0.4) - 2.0 * Q.value(0.3), 0.0);

  // The entropy term has F''(0+) = -2 + 2 tanh(beta)/beta < 0, so it is not
  // convex near the origin either; the flag reports that honestly.
  const auto E = LocalTerm::entropy(1.0);
  EXPECT_FALSE(E.convex_on_positive());
  EXPECT_LT(E.curvature_pos(1e-3), 0.0);
  EXPECT_TRUE(has_concave_triple(E));
}

TEST(LocalTerm, ParseVariant) {
  EXPECT_EQ(parse_local_variant("vee"), LocalVariant::vee);
  EXPECT_EQ(parse_local_variant("quartic"), LocalVariant::quartic);
  EXPECT_EQ(parse_local_variant("entropy"), LocalVariant::entropy);
  EXPECT_THROW(parse_local_variant("cubic"), std::invalid_argument);
  EXPECT_THROW(LocalTerm::entropy(0.0), std::invalid_argument);
}

TEST(ConstantBranch, VeeClosedForm) {
  for (double lambda : {0.5, 1.0, 1.5, 3.0}) {
    const auto b = constant_branch(LocalTerm::vee(), MixtureKernel::exponential(lambda));
    EXPECT_NEAR(b.level, 1.0 / (1.0 + 2.0 * lambda), 1e-10);
    EXPECT_NEAR(b.energy, 2.0 * lambda / (1.0 + 2.0 * lambda), 1e-10);
  }
}

TEST(ConstantBranch, NoInteraction) {
  const auto b = constant_branch(LocalTerm::vee(), MixtureKernel::exponential(0.0));
  EXPECT_NEAR(b.level, 1.0, 1e-12);
  EXPECT_NEAR(b.energy, 0.0, 1e-12);
}

TEST(ConstantBranch, QuarticMatchesGridScan) {
  const auto F = LocalTerm::quartic();
  const auto v = MixtureKernel::exponential(0.1);
  const auto b = constant_branch(F, v);
  const auto scan = oracle::constant_branch_scan(F, v);
  EXPECT_NEAR(b.level, scan.t, 2e-5);
  EXPECT_LE(b.energy, scan.value + 1e-12);
  EXPECT_LT(b.energy, F.value(0.0));
  const double c = v.total_integral();
  EXPECT_NEAR(F.derivative_pos(b.level) + 2.0 * c * b.level, 0.0, 1e-9);
  EXPECT_GT(F.curvature_pos(b.level) + 2.0 * c, 0.0);
}

TEST(ConstantBranch, EntropyMatchesGridScan) {
  for (double beta : {0.7, 2.0}) {
    const auto F = LocalTerm::entropy(beta);
    const auto v = MixtureKernel::exponential(0.4);
    const auto b = constant_branch(F, v);
    const auto scan = oracle::constant_branch_scan(F, v);
    EXPECT_NEAR(b.energy, scan.value, 1e-8);
    EXPECT_LE(b.energy, scan.value + 1e-12);
  }
}
