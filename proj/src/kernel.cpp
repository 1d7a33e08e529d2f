#include "mrlsr/kernel.hpp"

#include <cmath>
#include <string>

namespace mrlsr {

void KernelSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument("kernel bandwidth must be positive and finite, got " + std::to_string(bandwidth));
  }
}

double bandwidth_heuristic(const MatrixRef& inputs) {
  const Eigen::Index n = inputs.rows();
  if (n < 2) throw InvalidArgument("bandwidth heuristic needs at least two points");
  // sum_{i,j} ||x_i - x_j||^2 = 2 n sum_i ||x_i - xbar||^2, accumulated pairwise for accuracy.
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) row += (inputs.row(i) - inputs.row(j)).squaredNorm();
    total += row;
  }
  const double mu = 2.0 * total / (static_cast<double>(n) * static_cast<double>(n));
  if (!(mu > 0.0)) throw NumericalError("bandwidth heuristic is zero: all input rows are identical");
  return mu;
}

Matrix gram(const MatrixRef& inputs, const KernelSpec& kernel) {
  kernel.validate();
  const Eigen::Index n = inputs.rows();
  Matrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = kernel(inputs.row(i), inputs.row(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix cross_gram(const MatrixRef& queries, const MatrixRef& training_inputs, const KernelSpec& kernel) {
  kernel.validate();
  if (queries.cols() != training_inputs.cols()) {
    throw InvalidArgument("query dimension " + std::to_string(queries.cols()) + " does not match training dimension " +
                          std::to_string(training_inputs.cols()));
  }
  Matrix k(queries.rows(), training_inputs.rows());
  for (Eigen::Index j = 0; j < training_inputs.rows(); ++j) {
    for (Eigen::Index i = 0; i < queries.rows(); ++i) k(i, j) = kernel(queries.row(i), training_inputs.row(j));
  }
  return k;
}

Vector kernel_vector(const MatrixRef& training_inputs, const VectorRef& query, const KernelSpec& kernel) {
  if (query.size() != training_inputs.cols()) {
    throw InvalidArgument("query dimension " + std::to_string(query.size()) + " does not match training dimension " +
                          std::to_string(training_inputs.cols()));
  }
  return cross_gram(query.transpose(), training_inputs, kernel).transpose();
}

}  // namespace mrlsr
