#pragma once

#include <string>
#include <vector>

#include "mrlsr/core.hpp"
#include "mrlsr/data.hpp"
#include "mrlsr/kernel.hpp"
#include "mrlsr/rootfind.hpp"
#include "mrlsr/spectral.hpp"

namespace mrlsr {

/// Exponent m and regularization lambda of
///   min_f (1/n) sum (y_i - f(x_i))^2 + lambda ||f||^m,
/// plus root-finder settings.
struct SolverConfig {
  double m = 2.0;
  double lambda = 1.0;
  RootOptions root;

  void validate() const;
};

struct SolveReport {
  double c0 = 0.0;
  double residual = 0.0;
  int newton_iterations = 0;
  /// Distinct roots considered (1 unless the m <= 1 multi-start path ran).
  int candidate_count = 0;
  /// (1/n) ||Y - K alpha||^2 + lambda (alpha^T K alpha)^(m/2) of the selected solution.
  double primal_objective = 0.0;
  /// Targets vanish (up to round-off) on the range of K; the solution is f = 0.
  bool degenerate = false;
  RootReport roots;
  std::vector<std::string> notes;
};

/// Kernel expansion f(x) = sum_i alpha_i k(x, x_i) over stored training inputs.
struct Model {
  Vector alpha;
  Matrix training_inputs;
  KernelSpec kernel;
  SolverConfig config;
  SolveReport report;

  Vector predict(const MatrixRef& queries) const;
};

/// Coefficients in the eigenbasis of K, before rotation back by Q.
struct SpectralSolution {
  Vector rotated_alpha;
  SolveReport report;
};

/// Rotated coefficients 2 y'_i / (2 d_i + lambda m n C) for a given C.
Vector rotated_coefficients(const GramSpectrum& spectrum, double lambda, double m, double c);

/// Root finding and candidate selection on a precomputed spectrum. For m > 1 the
/// unique root is used; for m <= 1 every multi-start root is turned into a
/// candidate and the one with the lowest primal objective wins (ties go to the
/// smaller alpha^T K alpha).
SpectralSolution solve_from_spectrum(const GramSpectrum& spectrum, const SolverConfig& config);

/// Kernel ridge coefficients y'_i / (d_i + lambda2 n) on a precomputed spectrum.
SpectralSolution krr_from_spectrum(const GramSpectrum& spectrum, double lambda2);

/// Gram matrix, eigendecomposition, root finding, then alpha = Q alpha'.
Model fit_mrlsr(const Dataset& train, const KernelSpec& kernel, const SolverConfig& config);

/// Kernel ridge regression solving (K + lambda2 n I) alpha = Y through the spectrum.
Model fit_krr(const Dataset& train, const KernelSpec& kernel, double lambda2);

/// Builds a Model from a spectral solution without refitting.
Model assemble_model(const Dataset& train, const KernelSpec& kernel, const SolverConfig& config,
                     const GramSpectrum& spectrum, SpectralSolution solution);

Vector predict(const Model& model, const MatrixRef& queries);

/// (Y - K a)^T (Y - K a) + n lambda (a^T K a)^(m/2).
double dual_objective(const MatrixRef& gram, const VectorRef& targets, const VectorRef& a, double lambda, double m);

/// -2 K (Y - K a) + lambda m n (a^T K a)^(m/2 - 1) K a.
///
/// At a^T K a = 0 with m < 2 the power term is taken as zero when a = 0;
/// any other a in the null space of K is a singular point and throws.
Vector dual_gradient(const MatrixRef& gram, const VectorRef& targets, const VectorRef& a, double lambda, double m);

/// Y - K alpha - lambda (m n / 2) (alpha^T K alpha)^(m/2 - 1) alpha; zero at the minimizer.
Vector stationarity_residual(const MatrixRef& gram, const VectorRef& targets, const VectorRef& alpha, double lambda,
                             double m);

}  // namespace mrlsr
