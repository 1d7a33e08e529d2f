#pragma once

#include "mrlsr/core.hpp"

namespace mrlsr {

/// K = Q diag(d) Q^T with d descending and non-negative, plus the rotated
/// targets Q^T Y.
struct GramSpectrum {
  Matrix eigenvectors;
  Vector eigenvalues;
  Vector rotated_targets;
  /// Eigenvalues at or below this are numerically zero (set by decompose).
  double threshold = 0.0;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Eigendecomposition of a symmetric PSD matrix.
///
/// Eigenvalues in [-tau, 0) with tau = 1e-10 * n * max|K| are treated as
/// round-off and clamped to zero; anything more negative means K is not a
/// valid kernel matrix and raises NumericalError.
GramSpectrum decompose(const MatrixRef& gram, const VectorRef& targets);

/// Clamping threshold used by decompose.
double clamp_threshold(const MatrixRef& gram);

/// Q * coefficients: maps eigenbasis coefficients back to the sample basis.
Vector to_original_basis(const GramSpectrum& spectrum, const VectorRef& rotated);

/// Q^T * v.
Vector to_eigenbasis(const GramSpectrum& spectrum, const VectorRef& v);

}  // namespace mrlsr
