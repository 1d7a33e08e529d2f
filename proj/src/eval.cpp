#include "mrlsr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mrlsr/equivalence.hpp"

namespace mrlsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kPhase2Stream = 1000003;
constexpr std::uint64_t kSplitStream = 2000003;
constexpr std::uint64_t kOrderStream = 3000017;

// One fold's training spectrum and the validation kernel block rotated into
// the eigenbasis, so each grid cell costs a root solve plus one mat-vec.
struct FoldCache {
  GramSpectrum spectrum;
  Matrix projected;
  Vector validation_targets;
};

std::vector<FoldCache> build_folds(const Dataset& train, const KernelSpec& kernel, Eigen::Index fold_count,
                                   std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  spec.fold_count = fold_count;
  const auto folds = k_fold_indices(train.size(), spec);
  std::vector<FoldCache> caches(folds.size());
  parallel_for(folds.size(), [&](std::size_t f) {
    const Dataset fit = train.subset(folds[f].train);
    const Dataset val = train.subset(folds[f].test);
    FoldCache& c = caches[f];
    c.spectrum = decompose(gram(fit, kernel), fit.targets());
    c.projected = cross_gram(val.features(), fit.features(), kernel) * c.spectrum.eigenvectors;
    c.validation_targets = val.targets();
  });
  return caches;
}

template <typename Solve>
double score_fold(const FoldCache& fold, Solve&& solve) {
  try {
    const SpectralSolution sol = solve(fold.spectrum);
    return scaled_rmse(fold.projected * sol.rotated_alpha, fold.validation_targets);
  } catch (const NumericalError&) {
    return kInf;
  }
}

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  int failures = 0;
};

Summary summarize(const std::vector<double>& values) {
  Summary s;
  double sum = 0.0;
  for (double v : values) {
    if (std::isinf(v)) ++s.failures;
    sum += v;
  }
  if (s.failures > 0 || values.empty()) return {kInf, kInf, s.failures};
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return s;
}

double mean_finite(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// Lexicographic (mean, m, lambda) over a subset of rows.
const CVRow& best_row(const std::vector<CVRow>& rows, int phase) {
  const CVRow* best = nullptr;
  for (const auto& r : rows) {
    if (r.phase != phase) continue;
    if (best == nullptr || r.mean_rmse < best->mean_rmse ||
        (r.mean_rmse == best->mean_rmse &&
         (r.m < best->m || (r.m == best->m && r.lambda < best->lambda)))) {
      best = &r;
    }
  }
  if (best == nullptr || std::isinf(best->mean_rmse)) {
    throw NumericalError("cross-validation failed: every grid cell of phase " + std::to_string(phase) + " failed");
  }
  return *best;
}

void note_failures(CVResult& result, const CVRow& row) {
  if (row.failures == 0) return;
  std::ostringstream msg;
  msg << "phase " << row.phase << " m=" << row.m << " lambda=" << row.lambda << ": " << row.failures
      << " fold fit(s) failed, scored +inf";
  result.notes.push_back(msg.str());
}

std::vector<CVRow> lambda_scan(const std::vector<FoldCache>& folds, double m, const std::vector<double>& grid,
                               bool krr) {
  std::vector<CVRow> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) {
    std::vector<double> scores;
    scores.reserve(folds.size());
    for (const auto& fold : folds) {
      scores.push_back(score_fold(fold, [&](const GramSpectrum& s) {
        if (krr) return krr_from_spectrum(s, grid[g]);
        SolverConfig config;
        config.m = m;
        config.lambda = grid[g];
        return solve_from_spectrum(s, config);
      }));
    }
    const Summary sum = summarize(scores);
    rows[g] = CVRow{2, m, grid[g], sum.mean, sum.stddev, sum.failures};
  });
  return rows;
}

}  // namespace

double scaled_rmse(const VectorRef& predictions, const VectorRef& targets, double denominator) {
  if (predictions.size() != targets.size() || targets.size() < 1) {
    throw InvalidArgument("scaled RMSE needs equal-length, non-empty vectors");
  }
  if (!(denominator > 0.0)) throw InvalidArgument("scaled RMSE denominator (max target) must be positive");
  return std::sqrt((targets - predictions).squaredNorm() / static_cast<double>(targets.size())) / denominator;
}

double scaled_rmse(const VectorRef& predictions, const VectorRef& targets, RmseScale scale) {
  if (targets.size() < 1) throw InvalidArgument("scaled RMSE needs non-empty vectors");
  const double denom = scale == RmseScale::kTargetMax ? targets.maxCoeff() : targets.cwiseAbs().maxCoeff();
  return scaled_rmse(predictions, targets, denom);
}

std::vector<double> log_grid(double low, double high, int count) {
  if (count < 1 || !(low > 0.0) || !(high >= low)) throw InvalidArgument("invalid log grid");
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double a = std::log10(low);
  const double b = std::log10(high);
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] = count == 1 ? low : std::pow(10.0, a + (b - a) * i / (count - 1));
  }
  grid.front() = low;
  grid.back() = count == 1 ? low : high;
  return grid;
}

CVPlan CVPlan::standard(std::uint64_t seed) {
  CVPlan plan;
  for (int k = 1; k <= 29; ++k) plan.m_grid.push_back(k / 10.0);
  plan.lambda_grid = log_grid(1e-5, 1e2, 7);
  plan.fold_count = 10;
  plan.repeats = 10;
  plan.seed = seed;
  return plan;
}

void CVPlan::validate() const {
  if (m_grid.empty() || lambda_grid.empty()) throw InvalidArgument("CV grids must be non-empty");
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!std::all_of(m_grid.begin(), m_grid.end(), positive) ||
      !std::all_of(lambda_grid.begin(), lambda_grid.end(), positive) || !positive(phase1_lambda)) {
    throw InvalidArgument("CV grid values must be positive");
  }
  if (fold_count < 2) throw InvalidArgument("cross-validation needs at least two folds");
  if (repeats < 1) throw InvalidArgument("repeats must be positive");
}

std::vector<double> standard_krr_grid() { return log_grid(1e-7, 1e3, 25); }

CVResult cross_validate(const Dataset& train, const CVPlan& plan, const KernelSpec& kernel) {
  plan.validate();
  kernel.validate();
  CVResult result;

  // scores[g][r]: fold-averaged RMSE of m_grid[g] on repeat r.
  std::vector<std::vector<double>> scores(plan.m_grid.size(), std::vector<double>(static_cast<std::size_t>(plan.repeats)));
  std::vector<int> failures(plan.m_grid.size(), 0);
  for (int r = 0; r < plan.repeats; ++r) {
    const auto folds = build_folds(train, kernel, plan.fold_count, derive_seed(plan.seed, static_cast<std::uint64_t>(r)));
    parallel_for(plan.m_grid.size(), [&](std::size_t g) {
      SolverConfig config;
      config.m = plan.m_grid[g];
      config.lambda = plan.phase1_lambda;
      std::vector<double> fold_scores;
      for (const auto& fold : folds) {
        fold_scores.push_back(score_fold(fold, [&](const GramSpectrum& s) { return solve_from_spectrum(s, config); }));
      }
      const Summary s = summarize(fold_scores);
      failures[g] += s.failures;
      scores[g][static_cast<std::size_t>(r)] = s.mean;
    });
  }
  for (std::size_t g = 0; g < plan.m_grid.size(); ++g) {
    const Summary s = summarize(scores[g]);
    result.table.push_back(CVRow{1, plan.m_grid[g], plan.phase1_lambda, s.mean, s.stddev, failures[g]});
    note_failures(result, result.table.back());
  }
  result.best_m = best_row(result.table, 1).m;

  const auto folds = build_folds(train, kernel, plan.fold_count, derive_seed(plan.seed, kPhase2Stream));
  for (const auto& row : lambda_scan(folds, result.best_m, plan.lambda_grid, false)) {
    result.table.push_back(row);
    note_failures(result, row);
  }
  result.best_lambda = best_row(result.table, 2).lambda;
  return result;
}

CVResult cross_validate_krr(const Dataset& train, const std::vector<double>& lambda_grid, Eigen::Index fold_count,
                            std::uint64_t seed, const KernelSpec& kernel) {
  if (lambda_grid.empty()) throw InvalidArgument("KRR grid must be non-empty");
  kernel.validate();
  CVResult result;
  result.best_m = 2.0;
  const auto folds = build_folds(train, kernel, fold_count, derive_seed(seed, kPhase2Stream));
  result.table = lambda_scan(folds, 2.0, lambda_grid, true);
  for (const auto& row : result.table) note_failures(result, row);
  result.best_lambda = best_row(result.table, 2).lambda;
  return result;
}

std::vector<double> default_fractions() {
  std::vector<double> f;
  for (int k = 10; k <= 100; k += 5) f.push_back(k / 100.0);
  return f;
}

std::vector<CurveRow> learning_curve(const Dataset& data, double m, double lambda, const std::vector<double>& fractions,
                                     std::uint64_t seed, const CurveOptions& options) {
  SolverConfig config;
  config.m = m;
  config.lambda = lambda;
  config.validate();
  if (fractions.empty()) throw InvalidArgument("learning curve needs at least one fraction");
  if (options.repeats < 1) throw InvalidArgument("repeats must be positive");

  SplitSpec split_spec;
  split_spec.train_fraction = options.train_fraction;
  const Eigen::Index n_train_full =
      static_cast<Eigen::Index>(std::llround(static_cast<double>(data.size()) * options.train_fraction));
  std::vector<Eigen::Index> sizes;
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw InvalidArgument("fractions must lie in (0, 1]");
    const auto k = static_cast<Eigen::Index>(std::ceil(f * static_cast<double>(n_train_full) - 1e-9));
    if (k < 1) throw InvalidArgument("fraction " + std::to_string(f) + " leaves an empty training set");
    sizes.push_back(k);
  }

  const auto reps = static_cast<std::size_t>(options.repeats);
  const std::size_t cells = fractions.size();
  std::vector<std::vector<double>> mrlsr(cells, std::vector<double>(reps, kInf));
  std::vector<std::vector<double>> krr(cells, std::vector<double>(reps, kInf));
  std::vector<double> lambda2(reps, kInf);

  parallel_for(reps, [&](std::size_t r) {
    SplitSpec s = split_spec;
    s.seed = derive_seed(seed, kSplitStream + r);
    const auto [train, test] = split(data, s);
    const KernelSpec kernel{bandwidth_heuristic(train)};
    double l2 = kInf;
    try {
      l2 = matched_lambda2(m, fit_mrlsr(train, kernel, config).report.c0, lambda);
    } catch (const NumericalError&) {
      return;
    }
    lambda2[r] = l2;
    const auto order = shuffled_indices(train.size(), derive_seed(seed, kOrderStream + r));
    for (std::size_t c = 0; c < cells; ++c) {
      const std::span<const Eigen::Index> head(order.data(), static_cast<std::size_t>(sizes[c]));
      const Dataset sub = train.subset(head);
      const GramSpectrum spectrum = decompose(gram(sub, kernel), sub.targets());
      const Matrix projected = cross_gram(test.features(), sub.features(), kernel) * spectrum.eigenvectors;
      try {
        mrlsr[c][r] = scaled_rmse(projected * solve_from_spectrum(spectrum, config).rotated_alpha, test.targets());
      } catch (const NumericalError&) {
      }
      krr[c][r] = scaled_rmse(projected * krr_from_spectrum(spectrum, l2).rotated_alpha, test.targets());
    }
  });

  std::vector<double> ok_lambda2;
  for (double v : lambda2) {
    if (std::isfinite(v)) ok_lambda2.push_back(v);
  }
  if (ok_lambda2.empty()) throw NumericalError("learning curve: M-RLSR failed on every full training split");

  std::vector<CurveRow> rows;
  for (std::size_t c = 0; c < cells; ++c) {
    CurveRow row;
    row.fraction = fractions[c];
    row.n_train = sizes[c];
    row.lambda2 = mean_finite(ok_lambda2);
    std::vector<double> m_ok;
    std::vector<double> k_ok;
    for (std::size_t r = 0; r < reps; ++r) {
      if (!std::isfinite(lambda2[r])) {
        ++row.failures;
        continue;
      }
      if (std::isfinite(mrlsr[c][r])) {
        m_ok.push_back(mrlsr[c][r]);
      } else {
        ++row.failures;
      }
      k_ok.push_back(krr[c][r]);
    }
    const Summary ms = m_ok.empty() ? Summary{kInf, kInf, 0} : summarize(m_ok);
    const Summary ks = summarize(k_ok);
    row.mrlsr_rmse = ms.mean;
    row.mrlsr_std = ms.stddev;
    row.krr_rmse = ks.mean;
    row.krr_std = ks.stddev;
    rows.push_back(row);
  }
  return rows;
}

BenchmarkResult run_benchmark(const Dataset& data, const CVPlan& plan, const std::vector<double>& krr_grid,
                              std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = derive_seed(seed, kSplitStream);
  const auto [train, test] = split(data, spec);

  BenchmarkResult out;
  out.n_train = train.size();
  out.n_test = test.size();
  const KernelSpec kernel{bandwidth_heuristic(train)};
  out.bandwidth = kernel.bandwidth;

  CVPlan p = plan;
  p.seed = derive_seed(seed, 1);
  out.mrlsr_cv = cross_validate(train, p, kernel);
  out.krr_cv = cross_validate_krr(train, krr_grid, plan.fold_count, derive_seed(seed, 2), kernel);

  SolverConfig config;
  config.m = out.mrlsr_cv.best_m;
  config.lambda = out.mrlsr_cv.best_lambda;
  const Model mrlsr = fit_mrlsr(train, kernel, config);
  const Model krr = fit_krr(train, kernel, out.krr_cv.best_lambda);
  out.mrlsr_rmse = scaled_rmse(mrlsr.predict(test.features()), test.targets());
  out.krr_rmse = scaled_rmse(krr.predict(test.features()), test.targets());
  return out;
}

void write_cv_csv(const std::filesystem::path& path, const CVResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "phase,m,lambda,mean_rmse,std_rmse,failures,selected\n";
  for (const auto& r : result.table) {
    const bool selected = r.phase == 2 && r.m == result.best_m && r.lambda == result.best_lambda;
    out << r.phase << ',' << format_real(r.m) << ',' << format_real(r.lambda) << ',' << format_real(r.mean_rmse)
        << ',' << format_real(r.std_rmse) << ',' << r.failures << ',' << (selected ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurveRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "fraction,n_train,mrlsr_rmse,mrlsr_std,krr_rmse,krr_std,lambda2,failures\n";
  for (const auto& r : rows) {
    out << format_real(r.fraction) << ',' << r.n_train << ',' << format_real(r.mrlsr_rmse) << ','
        << format_real(r.mrlsr_std) << ',' << format_real(r.krr_rmse) << ',' << format_real(r.krr_std) << ','
        << format_real(r.lambda2) << ',' << r.failures << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_benchmark_csv(const std::filesystem::path& path, const BenchmarkResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "method,m,lambda,test_rmse,n_train,n_test,mu\n";
  out << "mrlsr," << format_real(result.mrlsr_cv.best_m) << ',' << format_real(result.mrlsr_cv.best_lambda) << ','
      << format_real(result.mrlsr_rmse) << ',' << result.n_train << ',' << result.n_test << ','
      << format_real(result.bandwidth) << '\n';
  out << "krr,2," << format_real(result.krr_cv.best_lambda) << ',' << format_real(result.krr_rmse) << ','
      << result.n_train << ',' << result.n_test << ',' << format_real(result.bandwidth) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mrlsr
