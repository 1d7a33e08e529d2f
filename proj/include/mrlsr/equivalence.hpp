#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrlsr/solver.hpp"

namespace mrlsr {

/// lambda2 = (m / 2) C0 lambda: the ridge parameter under which KRR returns the
/// same minimizer as M-RLSR on the set the root C0 was computed from.
double matched_lambda2(double m, double c0, double lambda);

/// matched_lambda2 for a fitted model. The mapping only holds for m > 1; smaller
/// exponents throw InvalidArgument.
double equivalent_lambda2(const Model& model);

struct PartDifference {
  std::string label;
  Eigen::Index size = 0;
  /// Root of F on this part for the M-RLSR fit.
  double c0 = 0.0;
  /// ||alpha_MRLSR - alpha_KRR||_2
  double alpha_diff = 0.0;
  /// ||f_MRLSR - f_KRR||_H = sqrt(delta^T K delta)
  double rkhs_diff = 0.0;
};

struct EquivalenceReport {
  double lambda = 0.0;
  double m = 0.0;
  double lambda2 = 0.0;
  double bandwidth = 0.0;
  std::vector<PartDifference> parts;

  /// Calibration part (Z1) agrees to 1e-8 in both norms.
  bool calibration_ok() const;
};

/// Splits the data into `parts` shuffled parts of (near) equal size, computes
/// lambda2 on the first, then fits M-RLSR(lambda) and KRR(lambda2) on every
/// part and records how far apart the two solutions are. The kernel bandwidth
/// defaults to the heuristic on Z1 and is shared by every part.
EquivalenceReport run_z_equivalence_experiment(const Dataset& data, double m, double lambda, Eigen::Index parts,
                                               std::uint64_t seed, std::optional<KernelSpec> kernel = std::nullopt);

/// CSV with header part,size,c0,alpha_diff,rkhs_diff.
void write_equivalence_csv(const std::filesystem::path& path, const EquivalenceReport& report);

}  // namespace mrlsr
