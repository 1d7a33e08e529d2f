#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mrlsr/solver.hpp"

namespace mrlsr {

/// Denominator of the scaled RMSE.
enum class RmseScale {
  kTargetMax,     ///< signed max of the evaluation targets
  kAbsTargetMax,  ///< max |y| of the evaluation targets
};

/// sqrt(mean((y - f)^2)) / max y. Throws InvalidArgument when the scale is not positive.
double scaled_rmse(const VectorRef& predictions, const VectorRef& targets, RmseScale scale = RmseScale::kTargetMax);

/// Same quantity with an explicit denominator (e.g. the training-set max).
double scaled_rmse(const VectorRef& predictions, const VectorRef& targets, double denominator);

/// n values equally spaced on a log10 scale from `low` to `high` inclusive.
std::vector<double> log_grid(double low, double high, int count);

/// Two-phase model selection plan: scan m at a fixed lambda, then scan lambda at the chosen m.
struct CVPlan {
  std::vector<double> m_grid;
  std::vector<double> lambda_grid;
  Eigen::Index fold_count = 10;
  int repeats = 10;
  std::uint64_t seed = 0;
  /// Lambda held fixed while scanning m.
  double phase1_lambda = 1.0;

  /// m in 0.1:0.1:2.9, lambda on 7 log-spaced values over [1e-5, 1e2], ten folds, ten repeats.
  static CVPlan standard(std::uint64_t seed);

  void validate() const;
};

/// 25 log-spaced values over [1e-7, 1e3].
std::vector<double> standard_krr_grid();

struct CVRow {
  int phase = 1;
  double m = 0.0;
  double lambda = 0.0;
  double mean_rmse = 0.0;
  double std_rmse = 0.0;
  /// Folds (summed over repeats) whose fit failed and scored +inf.
  int failures = 0;
};

struct CVResult {
  double best_m = 0.0;
  double best_lambda = 0.0;
  std::vector<CVRow> table;
  std::vector<std::string> notes;
};

/// Phase 1: lambda = plan.phase1_lambda, each m scored by the mean over
/// `repeats` reshuffled k-fold runs of the fold-averaged scaled RMSE.
/// Phase 2: m fixed at the phase-1 winner, each lambda scored by one k-fold run.
/// Failed cells score +inf and are noted. Ties go to smaller m, then smaller lambda.
CVResult cross_validate(const Dataset& train, const CVPlan& plan, const KernelSpec& kernel);

/// k-fold selection of the KRR ridge parameter (rows have m = 2, phase = 2).
CVResult cross_validate_krr(const Dataset& train, const std::vector<double>& lambda_grid, Eigen::Index fold_count,
                            std::uint64_t seed, const KernelSpec& kernel);

struct CurveOptions {
  int repeats = 10;
  double train_fraction = 0.7;
};

struct CurveRow {
  double fraction = 0.0;
  Eigen::Index n_train = 0;
  double mrlsr_rmse = 0.0;
  double mrlsr_std = 0.0;
  double krr_rmse = 0.0;
  double krr_std = 0.0;
  /// Mean KRR ridge parameter across repeats.
  double lambda2 = 0.0;
  int failures = 0;
};

/// 0.10, 0.15, ..., 1.00.
std::vector<double> default_fractions();

/// Per repeat: random train/test split, lambda2 = (m/2) C0 lambda from an
/// M-RLSR fit on the whole training part, then for each fraction both methods
/// are fitted on the leading rows of a shuffled training part and scored on
/// the test part. Rows report means over repeats that succeeded.
std::vector<CurveRow> learning_curve(const Dataset& data, double m, double lambda, const std::vector<double>& fractions,
                                     std::uint64_t seed, const CurveOptions& options = {});

struct BenchmarkResult {
  Eigen::Index n_train = 0;
  Eigen::Index n_test = 0;
  double bandwidth = 0.0;
  CVResult mrlsr_cv;
  CVResult krr_cv;
  double mrlsr_rmse = 0.0;
  double krr_rmse = 0.0;
};

/// 70/30 split; M-RLSR tuned by cross_validate(plan), KRR tuned on krr_grid with
/// the same fold count; both refitted on the training part and scored on the test part.
BenchmarkResult run_benchmark(const Dataset& data, const CVPlan& plan, const std::vector<double>& krr_grid,
                              std::uint64_t seed);

void write_cv_csv(const std::filesystem::path& path, const CVResult& result);
void write_curve_csv(const std::filesystem::path& path, const std::vector<CurveRow>& rows);
void write_benchmark_csv(const std::filesystem::path& path, const BenchmarkResult& result);

}  // namespace mrlsr
