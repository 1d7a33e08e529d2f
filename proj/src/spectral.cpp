#include "mrlsr/spectral.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>

namespace mrlsr {

double clamp_threshold(const MatrixRef& gram) {
  return 1e-10 * static_cast<double>(gram.rows()) * gram.cwiseAbs().maxCoeff();
}

GramSpectrum decompose(const MatrixRef& gram, const VectorRef& targets) {
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n || n == 0) throw InvalidArgument("Gram matrix must be square and non-empty");
  if (targets.size() != n) throw InvalidArgument("target length does not match Gram matrix size");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed to converge");

  const double tau = clamp_threshold(gram);
  const double smallest = solver.eigenvalues()(0);
  if (smallest < -tau) {
    std::ostringstream msg;
    msg << "Gram matrix is not positive semidefinite: eigenvalue " << smallest << " below -" << tau;
    throw NumericalError(msg.str());
  }

  // Eigen returns ascending order; reverse to descending.
  GramSpectrum s;
  s.eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
  s.eigenvectors = solver.eigenvectors().rowwise().reverse();
  s.rotated_targets = s.eigenvectors.transpose() * targets;
  s.threshold = tau;
  return s;
}

Vector to_original_basis(const GramSpectrum& spectrum, const VectorRef& rotated) {
  if (rotated.size() != spectrum.size()) throw InvalidArgument("coefficient length does not match spectrum size");
  return spectrum.eigenvectors * rotated;
}

Vector to_eigenbasis(const GramSpectrum& spectrum, const VectorRef& v) {
  if (v.size() != spectrum.size()) throw InvalidArgument("vector length does not match spectrum size");
  return spectrum.eigenvectors.transpose() * v;
}

}  // namespace mrlsr
