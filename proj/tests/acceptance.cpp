// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: mrlsr_acceptance <path-to-mrlsr-cli> [work-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrlsr/equivalence.hpp"
#include "mrlsr/eval.hpp"
#include "mrlsr/oracle.hpp"
#include "mrlsr/stability.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace mrlsr;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log10(lo), std::log10(hi));
  return std::pow(10.0, u(rng));
}

Outcome collapse_to_ridge() {
  std::mt19937_64 rng(101);
  const Eigen::Index sizes[] = {5, 30, 100};
  const Eigen::Index dims[] = {2, 10};
  double worst = 0.0;
  int worst_iters = 0;
  bool exact = true;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = sizes[t % 3];
    const Eigen::Index p = dims[(t / 3) % 2];
    const Dataset d = testing::random_dataset(n, p, 1000 + static_cast<std::uint64_t>(t));
    const KernelSpec k = testing::heuristic_kernel(d);
    const double lambda = log_uniform(rng, 1e-3, 1.0);
    const Model model = fit_mrlsr(d, k, {2.0, lambda, {}});
    const Matrix a = gram(d, k) + lambda * static_cast<double>(n) * Matrix::Identity(n, n);
    const Vector dense = a.ldlt().solve(d.targets());
    worst = std::max(worst, (model.alpha - dense).cwiseAbs().maxCoeff());
    exact = exact && model.report.c0 == 1.0;
    worst_iters = std::max(worst_iters, model.report.newton_iterations);
  }
  return {worst <= 1e-8 && exact && worst_iters <= 2,
          "max|alpha - dense| = " + fmt(worst) + ", C0 == 1 exactly: " + (exact ? "yes" : "no") +
              ", max iterations " + std::to_string(worst_iters)};
}

Outcome root_certificate() {
  const double exponents[] = {1.1, 1.5, 2.5, 4.0};
  double worst = 0.0;
  int sign_failures = 0;
  for (int t = 0; t < 50; ++t) {
    const double m = exponents[t % 4];
    const RootProblem p = testing::random_root_problem(5 + t, m, 5000 + static_cast<std::uint64_t>(t));
    const double c0 = find_root_unique(p).roots.front().value;
    worst = std::max(worst, std::abs(eval_F(p, c0)));
    const double eps = 1e-9 * std::max(1.0, c0);
    if (!(eval_F(p, std::max(0.0, c0 - eps)) > 0.0 && eval_F(p, c0 + eps) < 0.0)) ++sign_failures;
  }
  return {worst <= 1e-12 && sign_failures == 0,
          "max |F(C0)| = " + fmt(worst) + ", missing sign changes: " + std::to_string(sign_failures)};
}

Outcome stationarity() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<Eigen::Index> size(5, 50);
  const double exponents[] = {1.2, 1.5, 2.0, 3.0};
  double worst_ratio = 0.0;
  for (int t = 0; t < 30; ++t) {
    const double m = exponents[t % 4];
    const Dataset d = testing::random_dataset(size(rng), 3, 3000 + static_cast<std::uint64_t>(t));
    const KernelSpec k = testing::heuristic_kernel(d);
    const double lambda = log_uniform(rng, 1e-3, 1.0);
    const Model model = fit_mrlsr(d, k, {m, lambda, {}});
    const Vector r = stationarity_residual(gram(d, k), d.targets(), model.alpha, lambda, m);
    const double bound = 1e-6 * (1.0 + d.targets().cwiseAbs().maxCoeff());
    worst_ratio = std::max(worst_ratio, r.cwiseAbs().maxCoeff() / bound);
  }
  return {worst_ratio <= 1.0, "worst residual / bound = " + fmt(worst_ratio)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<Eigen::Index> size(8, 20);
  double worst = 0.0;
  int stalled = 0;
  for (int t = 0; t < 10; ++t) {
    const double m = t % 2 == 0 ? 1.5 : 2.5;
    const Dataset d = generate_synthetic(size(rng), 4000 + static_cast<std::uint64_t>(t));
    const KernelSpec k = testing::heuristic_kernel(d);
    const double lambda = log_uniform(rng, 1e-2, 1e-1);
    const Matrix g = gram(d, k);
    const Model model = fit_mrlsr(d, k, {m, lambda, {}});
    const double solver = dual_objective(g, d.targets(), model.alpha, lambda, m);
    const OracleResult o = minimize_dual(g, d.targets(), lambda, m, {.seed = static_cast<std::uint64_t>(t)});
    if (o.stalled) ++stalled;
    worst = std::max(worst, std::abs(o.objective - solver) / std::abs(solver));
  }
  return {worst <= 1e-6, "max relative objective gap = " + fmt(worst) + ", stalled runs " + std::to_string(stalled)};
}

Outcome gradient_checks() {
  std::mt19937_64 rng(505);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.05, 5.0);
  const double exponents[] = {1.2, 1.5, 2.0, 2.5, 3.0};
  double worst_grad = 0.0;
  double worst_slope = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double m = exponents[t % 5];
    const Dataset d = testing::random_dataset(10, 2, 6000 + static_cast<std::uint64_t>(t));
    const Matrix k = gram(d, testing::heuristic_kernel(d));
    const Vector a = Vector::NullaryExpr(10, [&] { return g(rng); });
    const Vector grad = dual_gradient(k, d.targets(), a, 0.1, m);
    Vector fd(10);
    for (Eigen::Index i = 0; i < 10; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(a(i)));
      Vector up = a, down = a;
      up(i) += h;
      down(i) -= h;
      fd(i) = (dual_objective(k, d.targets(), up, 0.1, m) - dual_objective(k, d.targets(), down, 0.1, m)) / (2.0 * h);
    }
    worst_grad = std::max(worst_grad, (grad - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff());

    const RootProblem p = testing::random_root_problem(12, m, 7000 + static_cast<std::uint64_t>(t));
    const double c = u(rng);
    const double h = 1e-6 * c;
    const double fd_slope = (eval_F(p, c + h) - eval_F(p, c - h)) / (2.0 * h);
    worst_slope = std::max(worst_slope, std::abs(eval_F_prime(p, c) - fd_slope) / std::abs(fd_slope));
  }
  return {worst_grad <= 1e-5 && worst_slope <= 1e-5,
          "dual_gradient rel err " + fmt(worst_grad) + ", eval_F_prime rel err " + fmt(worst_slope)};
}

Outcome z_equivalence() {
  const double exponents[] = {1.2, 1.5, 2.5};
  std::mt19937_64 rng(606);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double m = exponents[t % 3];
    const Dataset d = testing::random_dataset(15 + 3 * t, 3, 8000 + static_cast<std::uint64_t>(t));
    const KernelSpec k = testing::heuristic_kernel(d);
    const Model model = fit_mrlsr(d, k, {m, log_uniform(rng, 1e-3, 1.0), {}});
    const Model krr = fit_krr(d, k, equivalent_lambda2(model));
    worst = std::max(worst, (krr.alpha - model.alpha).cwiseAbs().maxCoeff());
  }

  const EquivalenceReport r = run_z_equivalence_experiment(generate_synthetic(2000, 3), 1.2, 1e-5, 4, 3);
  const double z1 = std::max(r.parts[0].alpha_diff, r.parts[0].rkhs_diff);
  double others = 0.0;
  for (std::size_t i = 1; i < r.parts.size(); ++i) others = std::max(others, r.parts[i].rkhs_diff);
  return {worst <= 1e-8 && z1 <= 1e-8 && others > 1e-6,
          "lambda2 refit max|dalpha| = " + fmt(worst) + "; Z1 diff " + fmt(z1) + ", max RKHS diff on Z2..Z4 " +
              fmt(others)};
}

Outcome stability_bound() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto bounded = [&](Eigen::Index n) {
    Matrix x = Matrix::NullaryExpr(n, 3, [&] { return u(rng); });
    Vector y = Vector::NullaryExpr(n, [&] { return u(rng); });
    return Dataset(std::move(x), std::move(y));
  };
  double worst_ratio = 0.0;
  for (double m : {2.0, 2.5, 3.0}) {
    for (double lambda : {1e-2, 1e-1, 1.0}) {
      const Dataset train = bounded(30);
      const Dataset probe = bounded(50);
      const StabilityReport r = empirical_stability(train, testing::heuristic_kernel(train), {m, lambda, {}}, probe);
      worst_ratio = std::max(worst_ratio, r.empirical_max / r.beta);
    }
  }
  const double unit = beta_bound({1.0, 1.0, 1.0, 2.0, 1}).beta;
  return {worst_ratio <= 1.0 && unit == 16.0,
          "max empirical/beta = " + fmt(worst_ratio) + ", beta(m=2, unit constants, n=1) = " + fmt(unit)};
}

Outcome synthetic_benchmark() {
  const std::uint64_t seed = 7;
  const BenchmarkResult r =
      run_benchmark(generate_synthetic(500, seed), CVPlan::standard(derive_seed(seed, 1)), standard_krr_grid(), seed);
  const bool pass = r.mrlsr_cv.best_m < 2.0 && r.mrlsr_rmse <= 1.1 * r.krr_rmse;
  return {pass, "selected m = " + fmt(r.mrlsr_cv.best_m) + ", lambda = " + fmt(r.mrlsr_cv.best_lambda) +
                    ", M-RLSR RMSE " + fmt(r.mrlsr_rmse) + " vs KRR " + fmt(r.krr_rmse) + " (ratio " +
                    fmt(r.mrlsr_rmse / r.krr_rmse) + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// File contents with the run directory replaced, so echoed paths compare equal.
std::string normalized(const fs::path& work, int run, const std::string& file) {
  const fs::path dir = work / ("run" + std::to_string(run));
  std::string text = slurp(dir / file);
  const std::string needle = dir.string();
  for (std::size_t pos; (pos = text.find(needle)) != std::string::npos;) text.replace(pos, needle.size(), "$D");
  return text;
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  if (cli.empty()) return {false, "no CLI path given"};
  struct Command {
    std::string name;
    std::string args;
    std::vector<std::string> files;
  };
  // Each command writes into its run directory ($D); stdout is captured too.
  const std::vector<Command> commands = {
      {"synth", "synth --n 120 --seed 5 --out $D/data.csv", {"data.csv"}},
      {"gram", "gram --data $D/data.csv --target y --stats", {}},
      {"fit", "fit --data $D/data.csv --target y --m 1.5 --lambda 0.01 --out $D/model.json", {"model.json"}},
      {"fit-small-m", "fit --data $D/data.csv --target y --m 0.5 --lambda 0.1 --out $D/model_small.json",
       {"model_small.json"}},
      {"predict", "predict --model $D/model.json --data $D/data.csv --target y --out $D/pred.csv", {"pred.csv"}},
      {"cv", "cv --data $D/data.csv --target y --protocol paper --seed 3 --folds 5 --repeats 2 --out $D/cv.csv",
       {"cv.csv"}},
      {"curve", "curve --data $D/data.csv --target y --m 1.5 --lambda 0.01 --seed 2 --repeats 3 --out $D/curve.csv",
       {"curve.csv"}},
      {"zequiv", "zequiv --data $D/data.csv --target y --m 1.2 --lambda 1e-4 --parts 4 --seed 1 --out $D/z.csv",
       {"z.csv"}},
      {"stability", "stability --data $D/data.csv --target y --m 2.5 --lambda 0.1 --probe-n 20 --train-n 30 --seed 4 "
                    "--out $D/stab.csv",
       {"stab.csv"}},
      {"oracle-check", "oracle-check --n 12 --m 1.5 --lambda 0.05 --seed 6", {}},
      {"bench", "bench --paper-protocol synthetic --n 150 --seed 9 --repeats 2 --out $D/bench.csv", {"bench.csv"}},
  };

  std::vector<std::string> mismatches;
  for (const auto& c : commands) {
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = work / ("run" + std::to_string(run));
      fs::create_directories(dir);
      std::string args = c.args;
      for (std::size_t pos; (pos = args.find("$D")) != std::string::npos;) args.replace(pos, 2, dir.string());
      // The second run uses the default thread count, the first a single worker.
      const std::string env = run == 0 ? "MRLSR_THREADS=1 " : "";
      const std::string cmd = env + "'" + cli + "' " + args + " > '" + (dir / (c.name + ".stdout")).string() + "' 2>&1";
      const int status = std::system(cmd.c_str());
      if (status != 0) {
        return {false, c.name + " exited with status " + std::to_string(status)};
      }
    }
    for (const auto& f : c.files) {
      if (slurp(work / "run0" / f).empty()) mismatches.push_back(f + " (empty)");
    }
    std::vector<std::string> files = c.files;
    files.push_back(c.name + ".stdout");
    for (const auto& f : files) {
      if (normalized(work, 0, f) != normalized(work, 1, f)) mismatches.push_back(f);
    }
  }
  if (!mismatches.empty()) {
    std::string list;
    for (const auto& m : mismatches) list += " " + m;
    return {false, "outputs not reproduced:" + list};
  }
  return {true, std::to_string(commands.size()) + " commands, outputs byte-identical across reruns"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "mrlsr_acceptance";
  fs::remove_all(work);

  const std::vector<Criterion> criteria = {
      {1, "m=2 collapses to kernel ridge", 5, collapse_to_ridge},
      {2, "root certificate", 5, root_certificate},
      {3, "stationarity", 10, stationarity},
      {4, "oracle equivalence", 60, oracle_equivalence},
      {5, "gradient checks", 5, gradient_checks},
      {6, "Z-equivalence", 60, z_equivalence},
      {7, "stability bound", 120, stability_bound},
      {8, "synthetic benchmark trend", 600, synthetic_benchmark},
      {9, "determinism", 600, [&] { return determinism(cli, work); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.time_limit_s) {
      o.pass = false;
      o.detail += "; runtime over the " + fmt(c.time_limit_s) + " s limit";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %-30s %s  %.2fs  %s\n", c.id, c.title.c_str(), o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
