#pragma once

#include <string>
#include <vector>

#include "mrlsr/core.hpp"
#include "mrlsr/spectral.hpp"

namespace mrlsr {

/// Scalar equation whose root fixes the M-RLSR dual coefficients:
///
///   F(C) = S(C)^(m/2 - 1) - C,   S(C) = sum_i 4 d_i y'_i^2 / (2 d_i + a C)^2,
///
/// with a = lambda * m * n. Terms with d_i = 0 contribute nothing and are skipped.
struct RootProblem {
  Vector eigenvalues;
  Vector rotated_targets;
  double lambda = 1.0;
  double m = 2.0;

  static RootProblem from_spectrum(const GramSpectrum& spectrum, double lambda, double m);

  Eigen::Index n() const { return eigenvalues.size(); }
  double scale() const { return lambda * m * static_cast<double>(n()); }

  void validate() const;
};

struct RootOptions {
  /// Iteration continues until |F(C)| <= tolerance. When the iterate can no
  /// longer improve (collapsed bracket, failed step search, iteration cap) the
  /// root is accepted if |F(C)| <= tolerance * max(1, C).
  double tolerance = 1e-12;
  int max_iter = 500;
};

/// One Newton run (multi-start) or the single safeguarded run (unique root).
struct RootTrajectory {
  double start = 0.0;
  double end = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct Root {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double start = 0.0;
  /// Number of starts that converged onto this root.
  int hits = 1;
};

enum class RootMethod { kNewtonUnique, kMultiStart };

struct RootReport {
  RootMethod method = RootMethod::kNewtonUnique;
  std::vector<Root> roots;
  std::vector<RootTrajectory> trajectories;
  /// Final sign-change bracket (unique-root method only).
  double bracket_low = 0.0;
  double bracket_high = 0.0;

  std::string describe() const;
};

/// Root finding failed; carries every trajectory for diagnostics.
class RootFindError : public NumericalError {
 public:
  RootFindError(const std::string& what, RootReport report);
  const RootReport& report() const { return report_; }

 private:
  RootReport report_;
};

/// S(C). Zero when every term with d_i > 0 has y'_i = 0.
double weighted_sum(const RootProblem& problem, double c);

/// F(C). Exactly 1 - C when m = 2. Throws NumericalError when S(C) = 0 and m < 2.
double eval_F(const RootProblem& problem, double c);

/// F'(C) = (m/2 - 1) S^(m/2 - 2) S'(C) - 1, with S'(C) = -2a sum 4 d y'^2 / (2d + aC)^3.
double eval_F_prime(const RootProblem& problem, double c);

/// Unique root for m > 1: bracket by doubling from [0, 1], then Newton steps
/// safeguarded by bisection whenever a step leaves the bracket.
RootReport find_root_unique(const RootProblem& problem, const RootOptions& options = {});

/// The m <= 1 search: damped Newton from ten starts log-spaced on [1, 1e4];
/// converged end points closer than 1e-8 (1 + |C|) are merged.
RootReport find_roots_multistart(const RootProblem& problem, const RootOptions& options = {});

/// Starting values used by find_roots_multistart.
std::vector<double> multistart_values();

}  // namespace mrlsr
