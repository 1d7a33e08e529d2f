#include <cmath>

#include <gtest/gtest.h>

#include "mrlsr/stability.hpp"
#include "test_support.hpp"

namespace mrlsr {
namespace {

TEST(BetaBound, UnitCaseIsSixteen) {
  const StabilityBound b = beta_bound({1.0, 1.0, 1.0, 2.0, 1});
  EXPECT_EQ(b.lipschitz_const, 4.0);
  EXPECT_EQ(b.beta, 16.0);
}

TEST(BetaBound, CubicCase) {
  // L = 2 (2 + (4 / 0.5)^(1/3)) = 8, beta = 8 sqrt(2 * 8 / 25) = 6.4.
  const StabilityBound b = beta_bound({2.0, 1.0, 0.5, 3.0, 50});
  EXPECT_NEAR(b.lipschitz_const, 8.0, 1e-14);
  EXPECT_NEAR(b.beta, 6.4, 1e-14);
}

TEST(BetaBound, DecreasesWithSampleSize) {
  double prev = INFINITY;
  for (Eigen::Index n : {1, 10, 100, 1000}) {
    const double beta = beta_bound({1.0, 1.0, 0.1, 2.5, n}).beta;
    EXPECT_LT(beta, prev);
    prev = beta;
  }
}

TEST(BetaBound, RejectsOutOfDomain) {
  EXPECT_THROW(beta_bound({1.0, 1.0, 1.0, 1.5, 10}), InvalidArgument);
  EXPECT_THROW(beta_bound({1.0, 1.0, 0.0, 2.0, 10}), InvalidArgument);
  EXPECT_THROW(beta_bound({1.0, 1.0, 1.0, 2.0, 0}), InvalidArgument);
}

Dataset bounded(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix x = Matrix::NullaryExpr(n, 2, [&] { return u(rng); });
  Vector y = Vector::NullaryExpr(n, [&] { return u(rng); });
  return Dataset(std::move(x), std::move(y));
}

TEST(EmpiricalStability, WithinBound) {
  const Dataset train = bounded(15, 1);
  const Dataset probe = bounded(20, 2);
  for (double m : {2.0, 3.0}) {
    const StabilityReport r = empirical_stability(train, KernelSpec{1.0}, {m, 0.1, {}}, probe);
    EXPECT_TRUE(r.satisfied);
    EXPECT_LE(r.empirical_max, r.beta);
    EXPECT_GT(r.empirical_max, 0.0);
    EXPECT_LT(r.worst_index, 15);
    EXPECT_NEAR(r.kappa, 1.0, 1e-11);
  }
}

TEST(EmpiricalStability, SingleTrainingPoint) {
  const Dataset train = bounded(1, 3);
  const Dataset probe = bounded(5, 4);
  const StabilityReport r = empirical_stability(train, KernelSpec{1.0}, {2.0, 1.0, {}}, probe);
  EXPECT_TRUE(r.satisfied);
  EXPECT_EQ(r.worst_index, 0);
}

}  // namespace
}  // namespace mrlsr
