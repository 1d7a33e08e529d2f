// Command-line front end: synthetic data, fitting, prediction and the
// evaluation experiments. Exit codes: 0 success, 1 usage or I/O error,
// 2 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "CLI11.hpp"
#include "mrlsr/data.hpp"
#include "mrlsr/equivalence.hpp"
#include "mrlsr/eval.hpp"
#include "mrlsr/kernel.hpp"
#include "mrlsr/model_io.hpp"
#include "mrlsr/oracle.hpp"
#include "mrlsr/solver.hpp"
#include "mrlsr/stability.hpp"

namespace {

using namespace mrlsr;

constexpr int kUsageError = 1;
constexpr int kNumericalError = 2;

struct DataSource {
  std::string path;
  std::string target = "-1";
  Eigen::Index synthetic_n = 0;

  // Either --data or --synthetic-n must be given; load() enforces it.
  void add_to(CLI::App* cmd) {
    auto* data = cmd->add_option("--data", path, "Input CSV file");
    cmd->add_option("--target", target, "Target column: header name or index (negative counts from the end)")
        ->capture_default_str();
    auto* synth = cmd->add_option("--synthetic-n", synthetic_n, "Use a generated synthetic dataset of this size");
    data->excludes(synth);
  }

  Dataset load(std::uint64_t seed) const {
    if (synthetic_n > 0) return generate_synthetic(synthetic_n, derive_seed(seed, 0));
    if (path.empty()) throw InvalidArgument("--data or --synthetic-n is required");
    TargetColumn column = target;
    try {
      std::size_t used = 0;
      const long idx = std::stol(target, &used);
      if (used == target.size()) column = idx;
    } catch (const std::exception&) {
    }
    return load_csv(path, column);
  }
};

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
}

KernelSpec kernel_for(const Dataset& data, double mu) {
  return KernelSpec{mu > 0.0 ? mu : bandwidth_heuristic(data)};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

int run(int argc, char** argv) {
  CLI::App app{"M-power regularized least squares regression in an RKHS"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate the 10-input synthetic regression dataset");
  Eigen::Index synth_n = 0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  bool synth_no_noise = false;
  synth->add_option("--n", synth_n, "Number of rows")->required()->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output CSV")->required();
  synth->add_flag("--no-noise", synth_no_noise, "Omit the N(0,1) noise term");

  // gram
  auto* gram_cmd = app.add_subcommand("gram", "Kernel bandwidth and Gram matrix statistics");
  DataSource gram_src;
  gram_src.add_to(gram_cmd);
  bool gram_stats = false;
  double gram_mu = 0.0;
  std::uint64_t gram_seed = 0;
  gram_cmd->add_flag("--stats", gram_stats, "Print bandwidth and spectrum summary");
  gram_cmd->add_option("--mu", gram_mu, "Kernel bandwidth (default: heuristic)");
  gram_cmd->add_option("--seed", gram_seed, "Seed for --synthetic-n");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit an M-RLSR model and write it as JSON");
  DataSource fit_src;
  fit_src.add_to(fit);
  double fit_m = 0.0;
  double fit_lambda = 0.0;
  double fit_mu = 0.0;
  double fit_tol = RootOptions{}.tolerance;
  int fit_max_iter = RootOptions{}.max_iter;
  std::uint64_t fit_seed = 0;
  std::string fit_out;
  fit->add_option("--m", fit_m, "Regularization exponent (> 0)")->required();
  fit->add_option("--lambda", fit_lambda, "Regularization weight (> 0)")->required();
  fit->add_option("--mu", fit_mu, "Kernel bandwidth (default: heuristic)");
  fit->add_option("--root-tol", fit_tol, "Residual tolerance of the root finder")->capture_default_str();
  fit->add_option("--max-iter", fit_max_iter, "Root finder iteration cap")->capture_default_str();
  fit->add_option("--seed", fit_seed, "Seed for --synthetic-n");
  fit->add_option("--out", fit_out, "Model JSON path")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "Evaluate a saved model on query rows");
  std::string pred_model;
  std::string pred_data;
  std::string pred_target;
  std::string pred_out;
  pred->add_option("--model", pred_model, "Model JSON")->required();
  pred->add_option("--data", pred_data, "Query CSV")->required();
  pred->add_option("--target", pred_target, "Target column to drop and score against (optional)");
  pred->add_option("--out", pred_out, "Predictions CSV")->required();

  // cv
  auto* cv = app.add_subcommand("cv", "Two-phase cross-validation of m and lambda");
  DataSource cv_src;
  cv_src.add_to(cv);
  std::string cv_protocol = "paper";
  std::uint64_t cv_seed = 0;
  std::string cv_out;
  Eigen::Index cv_folds = 10;
  int cv_repeats = 10;
  bool cv_standardize = false;
  cv->add_option("--protocol", cv_protocol, "Grid protocol")->check(CLI::IsMember({"paper"}))->capture_default_str();
  cv->add_option("--seed", cv_seed, "Random seed")->capture_default_str();
  cv->add_option("--folds", cv_folds, "Fold count")->capture_default_str();
  cv->add_option("--repeats", cv_repeats, "Repeats of the m scan")->capture_default_str();
  cv->add_flag("--standardize", cv_standardize, "Standardize features before computing kernels");
  cv->add_option("--out", cv_out, "Output table CSV")->required();

  // curve
  auto* curve = app.add_subcommand("curve", "Learning curve of M-RLSR against Z-equivalent KRR");
  DataSource curve_src;
  curve_src.add_to(curve);
  double curve_m = 0.0;
  double curve_lambda = 0.0;
  std::uint64_t curve_seed = 0;
  int curve_repeats = 10;
  std::vector<double> curve_fractions = default_fractions();
  std::string curve_out;
  curve->add_option("--m", curve_m, "Regularization exponent")->required();
  curve->add_option("--lambda", curve_lambda, "Regularization weight")->required();
  curve->add_option("--seed", curve_seed, "Random seed")->capture_default_str();
  curve->add_option("--repeats", curve_repeats, "Repeats per fraction")->capture_default_str();
  curve->add_option("--fractions", curve_fractions, "Training fractions in (0, 1]")->delimiter(',');
  curve->add_option("--out", curve_out, "Output CSV")->required();

  // zequiv
  auto* zequiv = app.add_subcommand("zequiv", "Z-equivalence experiment across data parts");
  DataSource z_src;
  z_src.add_to(zequiv);
  double z_m = 0.0;
  double z_lambda = 0.0;
  Eigen::Index z_parts = 4;
  std::uint64_t z_seed = 0;
  std::string z_out;
  zequiv->add_option("--m", z_m, "Regularization exponent (> 1)")->required();
  zequiv->add_option("--lambda", z_lambda, "Regularization weight")->required();
  zequiv->add_option("--parts", z_parts, "Number of parts")->capture_default_str();
  zequiv->add_option("--seed", z_seed, "Random seed")->capture_default_str();
  zequiv->add_option("--out", z_out, "Report CSV")->required();

  // stability
  auto* stab = app.add_subcommand("stability", "Leave-one-out check of the uniform stability bound");
  DataSource stab_src;
  stab_src.add_to(stab);
  double stab_m = 0.0;
  double stab_lambda = 0.0;
  Eigen::Index stab_probe = 50;
  Eigen::Index stab_train = 0;
  std::uint64_t stab_seed = 0;
  std::string stab_out;
  stab->add_option("--m", stab_m, "Regularization exponent (>= 2)")->required();
  stab->add_option("--lambda", stab_lambda, "Regularization weight")->required();
  stab->add_option("--probe-n", stab_probe, "Rows held out as probe points")->capture_default_str();
  stab->add_option("--train-n", stab_train, "Training rows (default: all remaining)");
  stab->add_option("--seed", stab_seed, "Random seed")->capture_default_str();
  stab->add_option("--out", stab_out, "Report CSV (optional)");

  // oracle-check
  auto* oracle = app.add_subcommand("oracle-check", "Compare the solver against gradient descent on the dual");
  Eigen::Index oracle_n = 12;
  double oracle_m = 0.0;
  double oracle_lambda = 0.0;
  std::uint64_t oracle_seed = 0;
  oracle->add_option("--n", oracle_n, "Sample size (<= 50)")->capture_default_str();
  oracle->add_option("--m", oracle_m, "Regularization exponent (> 1)")->required();
  oracle->add_option("--lambda", oracle_lambda, "Regularization weight")->required();
  oracle->add_option("--seed", oracle_seed, "Random seed")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "M-RLSR vs KRR test RMSE under the two-phase selection protocol");
  std::string bench_protocol;
  DataSource bench_src;
  bench_src.add_to(bench);
  Eigen::Index bench_n = 500;
  std::uint64_t bench_seed = 0;
  int bench_repeats = 10;
  std::string bench_out;
  bench->add_option("--paper-protocol", bench_protocol, "Dataset for the protocol: 'synthetic' or 'csv' (uses --data)")
      ->check(CLI::IsMember({"synthetic", "csv"}))
      ->required();
  bench->add_option("--n", bench_n, "Synthetic dataset size")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Random seed")->capture_default_str();
  bench->add_option("--repeats", bench_repeats, "Repeats of the m scan")->capture_default_str();
  bench->add_option("--out", bench_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  if (*synth) {
    write_csv(synth_out, generate_synthetic(synth_n, synth_seed, {.noise = !synth_no_noise}));
    std::cout << "wrote " << synth_n << " rows to " << synth_out << '\n';
  } else if (*gram_cmd) {
    const Dataset data = gram_src.load(gram_seed);
    const KernelSpec kernel = kernel_for(data, gram_mu);
    std::cout << "n=" << data.size() << " p=" << data.dimension() << " mu=" << format_real(kernel.bandwidth) << '\n';
    if (gram_stats) {
      const Matrix k = gram(data, kernel);
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(k, Eigen::EigenvaluesOnly);
      Matrix off = k;
      off.diagonal().setConstant(1.0);
      std::cout << "min_entry=" << format_real(off.minCoeff())
                << " min_eigenvalue=" << format_real(eig.eigenvalues()(0))
                << " max_eigenvalue=" << format_real(eig.eigenvalues()(k.rows() - 1)) << '\n';
    }
  } else if (*fit) {
    require_positive(fit_m, "--m");
    require_positive(fit_lambda, "--lambda");
    const Dataset data = fit_src.load(fit_seed);
    SolverConfig config;
    config.m = fit_m;
    config.lambda = fit_lambda;
    config.root = {fit_tol, fit_max_iter};
    const Model model = fit_mrlsr(data, kernel_for(data, fit_mu), config);
    save_model(fit_out, model);
    std::cout << "c0=" << format_real(model.report.c0) << " residual=" << format_real(model.report.residual)
              << " iterations=" << model.report.newton_iterations << " candidates=" << model.report.candidate_count
              << " objective=" << format_real(model.report.primal_objective) << '\n';
    for (const auto& note : model.report.notes) std::cout << "note: " << note << '\n';
  } else if (*pred) {
    const Model model = load_model(pred_model);
    std::optional<Dataset> labeled;
    Matrix queries;
    if (!pred_target.empty()) {
      DataSource src{pred_data, pred_target, 0};
      labeled = src.load(0);
      queries = labeled->features();
    } else {
      queries = load_features_csv(pred_data);
    }
    const Vector p = model.predict(queries);
    std::ofstream out(pred_out);
    if (!out) throw IoError("cannot write " + pred_out);
    out << "prediction\n";
    for (Eigen::Index i = 0; i < p.size(); ++i) out << format_real(p(i)) << '\n';
    if (labeled) std::cout << "scaled_rmse=" << format_real(scaled_rmse(p, labeled->targets())) << '\n';
  } else if (*cv) {
    Dataset data = cv_src.load(cv_seed);
    if (cv_standardize) data = Standardizer::fit(data).apply(data);
    CVPlan plan = CVPlan::standard(cv_seed);
    plan.fold_count = cv_folds;
    plan.repeats = cv_repeats;
    const CVResult result = cross_validate(data, plan, kernel_for(data, 0.0));
    write_cv_csv(cv_out, result);
    std::cout << "best_m=" << format_real(result.best_m) << " best_lambda=" << format_real(result.best_lambda) << '\n';
    for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
  } else if (*curve) {
    const Dataset data = curve_src.load(curve_seed);
    CurveOptions options;
    options.repeats = curve_repeats;
    write_curve_csv(curve_out, learning_curve(data, curve_m, curve_lambda, curve_fractions, curve_seed, options));
  } else if (*zequiv) {
    const Dataset data = z_src.load(z_seed);
    const EquivalenceReport report = run_z_equivalence_experiment(data, z_m, z_lambda, z_parts, z_seed);
    write_equivalence_csv(z_out, report);
    std::cout << "lambda2=" << format_real(report.lambda2) << " mu=" << format_real(report.bandwidth) << '\n';
    if (!report.calibration_ok()) {
      std::cerr << "calibration part differs by more than 1e-8\n";
      return kNumericalError;
    }
  } else if (*stab) {
    const Dataset data = stab_src.load(stab_seed);
    if (stab_probe < 1 || stab_probe >= data.size()) throw InvalidArgument("--probe-n must leave training rows");
    const auto order = shuffled_indices(data.size(), derive_seed(stab_seed, 1));
    const Eigen::Index available = data.size() - stab_probe;
    const Eigen::Index n_train = stab_train > 0 ? std::min(stab_train, available) : available;
    const std::span<const Eigen::Index> all(order);
    const Dataset probe = data.subset(all.first(static_cast<std::size_t>(stab_probe)));
    const Dataset train = data.subset(all.subspan(static_cast<std::size_t>(stab_probe), static_cast<std::size_t>(n_train)));
    SolverConfig config;
    config.m = stab_m;
    config.lambda = stab_lambda;
    const StabilityReport r = empirical_stability(train, kernel_for(train, 0.0), config, probe);
    std::ostringstream csv;
    csv << "n_train,n_probe,cy,kappa,lipschitz_const,beta,empirical_max,satisfied\n"
        << train.size() << ',' << probe.size() << ',' << format_real(r.cy) << ',' << format_real(r.kappa) << ','
        << format_real(r.lipschitz_const) << ',' << format_real(r.beta) << ',' << format_real(r.empirical_max) << ','
        << (r.satisfied ? 1 : 0) << '\n';
    if (!stab_out.empty()) write_text(stab_out, csv.str());
    std::cout << csv.str();
    if (!r.satisfied) return kNumericalError;
  } else if (*oracle) {
    const Dataset data = generate_synthetic(oracle_n, derive_seed(oracle_seed, 0));
    const Matrix k = gram(data, KernelSpec{bandwidth_heuristic(data)});
    SolverConfig config;
    config.m = oracle_m;
    config.lambda = oracle_lambda;
    const GramSpectrum spectrum = decompose(k, data.targets());
    const Vector alpha = to_original_basis(spectrum, solve_from_spectrum(spectrum, config).rotated_alpha);
    const double solver_obj = dual_objective(k, data.targets(), alpha, oracle_lambda, oracle_m);
    OracleConfig oc;
    oc.seed = derive_seed(oracle_seed, 1);
    const OracleResult o = minimize_dual(k, data.targets(), oracle_lambda, oracle_m, oc);
    const double gap = std::abs(o.objective - solver_obj) / (1.0 + solver_obj);
    std::cout << "solver_objective=" << format_real(solver_obj) << " oracle_objective=" << format_real(o.objective)
              << " relative_gap=" << format_real(gap) << " oracle_steps=" << o.steps
              << " oracle_converged=" << (o.converged ? 1 : 0) << '\n';
    if (gap > 1e-6) return kNumericalError;
  } else if (*bench) {
    const Dataset data = bench_protocol == "synthetic" ? generate_synthetic(bench_n, derive_seed(bench_seed, 0))
                                                       : bench_src.load(bench_seed);
    CVPlan plan = CVPlan::standard(bench_seed);
    plan.repeats = bench_repeats;
    const BenchmarkResult result = run_benchmark(data, plan, standard_krr_grid(), bench_seed);
    if (bench_out.empty()) {
      std::cout << "method,m,lambda,test_rmse\n"
                << "mrlsr," << format_real(result.mrlsr_cv.best_m) << ',' << format_real(result.mrlsr_cv.best_lambda)
                << ',' << format_real(result.mrlsr_rmse) << '\n'
                << "krr,2," << format_real(result.krr_cv.best_lambda) << ',' << format_real(result.krr_rmse) << '\n';
    } else {
      write_benchmark_csv(bench_out, result);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const RootFindError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
}
