#pragma once

#include <cstdint>

#include "mrlsr/core.hpp"

namespace mrlsr {

struct OracleConfig {
  double step_size = 1e-2;
  int max_steps = 100000;
  /// Stop once the gradient max-norm falls below this.
  double gradient_tolerance = 1e-8;
  /// Seed of the 1e-3 starting perturbation around a = 0.
  std::uint64_t seed = 0;
};

struct OracleResult {
  Vector a;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int steps = 0;
  bool converged = false;
  /// Line search found no decrease at the smallest step after progress had been made.
  bool stalled = false;
};

/// Brute-force minimizer of (Y - K a)^T (Y - K a) + n lambda (a^T K a)^(m/2)
/// by gradient descent with step halving (up to 40 halvings per iteration).
/// Limited to n <= 50 and m > 1; a line search that cannot decrease the
/// objective on the very first iteration throws NumericalError.
OracleResult minimize_dual(const MatrixRef& gram, const VectorRef& targets, double lambda, double m,
                           const OracleConfig& config = {});

}  // namespace mrlsr
