#include <gtest/gtest.h>

#include "mrlsr/spectral.hpp"
#include "test_support.hpp"

namespace mrlsr {
namespace {

TEST(Decompose, ReconstructsGram) {
  const Dataset d = testing::random_dataset(25, 3, 1);
  const Matrix k = gram(d, testing::heuristic_kernel(d));
  const GramSpectrum s = decompose(k, d.targets());
  const Matrix rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
  EXPECT_LT((rebuilt - k).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix qtq = s.eigenvectors.transpose() * s.eigenvectors;
  EXPECT_LT((qtq - Matrix::Identity(25, 25)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Decompose, DescendingNonNegativeAndRotatedTargets) {
  const Dataset d = testing::random_dataset(12, 2, 4);
  const GramSpectrum s = decompose(gram(d, KernelSpec{0.5}), d.targets());
  for (Eigen::Index i = 1; i < s.size(); ++i) EXPECT_GE(s.eigenvalues(i - 1), s.eigenvalues(i));
  EXPECT_GE(s.eigenvalues.minCoeff(), 0.0);
  EXPECT_LT((s.rotated_targets - s.eigenvectors.transpose() * d.targets()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((to_original_basis(s, s.rotated_targets) - d.targets()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(to_eigenbasis(s, d.targets()), s.rotated_targets);
}

TEST(Decompose, DiagonalByHand) {
  Matrix k = Matrix::Zero(3, 3);
  k.diagonal() << 1.0, 3.0, 2.0;
  Vector y(3);
  y << 10.0, 30.0, 20.0;
  const GramSpectrum s = decompose(k, y);
  EXPECT_EQ(s.eigenvalues, Vector::LinSpaced(3, 3.0, 1.0));
  EXPECT_DOUBLE_EQ(std::abs(s.rotated_targets(0)), 30.0);
  EXPECT_DOUBLE_EQ(std::abs(s.rotated_targets(2)), 10.0);
}

TEST(Decompose, ClampsRoundOffNegatives) {
  // Rank-one Gram of identical points has eigenvalues n and zeros up to round-off.
  const Matrix k = Matrix::Ones(6, 6);
  const GramSpectrum s = decompose(k, Vector::Ones(6));
  EXPECT_NEAR(s.eigenvalues(0), 6.0, 1e-12);
  EXPECT_GE(s.eigenvalues.tail(5).minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(clamp_threshold(k), 1e-10 * 6.0);
}

TEST(Decompose, RejectsIndefiniteAndAsymmetricShapes) {
  Matrix k = Matrix::Identity(2, 2);
  k(1, 1) = -0.5;
  EXPECT_THROW(decompose(k, Vector::Ones(2)), NumericalError);
  EXPECT_THROW(decompose(Matrix::Identity(2, 3), Vector::Ones(2)), InvalidArgument);
  EXPECT_THROW(decompose(Matrix::Identity(2, 2), Vector::Ones(3)), InvalidArgument);
}

TEST(Decompose, SingleSample) {
  const GramSpectrum s = decompose(Matrix::Ones(1, 1), Vector::Constant(1, 2.5));
  EXPECT_EQ(s.size(), 1);
  EXPECT_DOUBLE_EQ(s.eigenvalues(0), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(s.rotated_targets(0)), 2.5);
}

}  // namespace
}  // namespace mrlsr
