#pragma once

#include "mrlsr/solver.hpp"

namespace mrlsr {

/// Constants of the boundedness hypotheses: |Y| < cy almost surely and
/// sup k(x, x) < kappa^2.
struct StabilityInput {
  double cy = 1.0;
  double kappa = 1.0;
  double lambda = 1.0;
  double m = 2.0;
  Eigen::Index n = 1;
};

struct StabilityBound {
  /// Lipschitz constant of the squared loss over the reachable predictions:
  /// 2 (cy + kappa (cy^2 / lambda)^(1/m)).
  double lipschitz_const = 0.0;
  /// L kappa (2^(m-2) L kappa / (lambda n))^(1/(m-1)).
  double beta = 0.0;
};

/// Uniform stability constant for m >= 2. Throws InvalidArgument for m < 2,
/// where no bound is known.
StabilityBound beta_bound(const StabilityInput& input);

struct StabilityReport {
  double lipschitz_const = 0.0;
  double beta = 0.0;
  double empirical_max = 0.0;
  bool satisfied = false;
  double cy = 0.0;
  double kappa = 0.0;
  /// Index of the left-out training point attaining empirical_max.
  Eigen::Index worst_index = 0;
};

/// Refits with every training point left out in turn and measures the largest
/// change of the squared loss over the probe set. cy is max |y| over training
/// and probe targets; kappa is 1 + 1e-12 (Gaussian kernels have unit diagonal).
/// Leaving out the only point of a one-row set yields the zero function.
StabilityReport empirical_stability(const Dataset& train, const KernelSpec& kernel, const SolverConfig& config,
                                    const Dataset& probe);

}  // namespace mrlsr
