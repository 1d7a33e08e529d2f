#pragma once

#include <cmath>

#include "mrlsr/core.hpp"
#include "mrlsr/data.hpp"

namespace mrlsr {

/// Gaussian kernel k(x, x') = exp(-||x - x'||^2 / bandwidth).
///
/// The bandwidth is in squared-distance units. Any type exposing
/// `operator()(row, row)` and `from_squared_distance` can stand in for it in
/// the Gram helpers below; only the Gaussian is provided.
struct KernelSpec {
  double bandwidth = 1.0;

  /// Throws InvalidArgument unless the bandwidth is positive and finite.
  void validate() const;

  double from_squared_distance(double squared_distance) const { return std::exp(-squared_distance / bandwidth); }

  template <typename A, typename B>
  double operator()(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) const {
    return from_squared_distance((a - b).squaredNorm());
  }
};

/// Mean of all n^2 pairwise squared distances, diagonal included.
/// Throws NumericalError when every row is identical.
double bandwidth_heuristic(const MatrixRef& inputs);
inline double bandwidth_heuristic(const Dataset& data) { return bandwidth_heuristic(data.features()); }

/// Symmetric Gram matrix over the rows of `inputs`; upper triangle computed and mirrored.
Matrix gram(const MatrixRef& inputs, const KernelSpec& kernel);
inline Matrix gram(const Dataset& data, const KernelSpec& kernel) { return gram(data.features(), kernel); }

/// Kernel values between each query row and each training row (queries x training).
Matrix cross_gram(const MatrixRef& queries, const MatrixRef& training_inputs, const KernelSpec& kernel);

/// (k(query, x_i))_i over the training rows.
Vector kernel_vector(const MatrixRef& training_inputs, const VectorRef& query, const KernelSpec& kernel);

}  // namespace mrlsr
