#include "mrlsr/solver.hpp"

#include <cmath>
#include <sstream>

namespace mrlsr {

namespace {

struct Objective {
  double primal = 0.0;
  double norm_squared = 0.0;
};

// Both terms read off the spectrum: ||Y - K alpha||^2 = sum (y'_i - d_i alpha'_i)^2
// and alpha^T K alpha = sum d_i alpha'_i^2.
Objective spectral_objective(const GramSpectrum& s, const VectorRef& rotated_alpha, double lambda, double m) {
  const Vector fitted = s.eigenvalues.cwiseProduct(rotated_alpha);
  const double loss = (s.rotated_targets - fitted).squaredNorm();
  const double norm_sq = std::max(0.0, s.eigenvalues.dot(rotated_alpha.cwiseAbs2()));
  const double n = static_cast<double>(s.size());
  return {loss / n + lambda * std::pow(norm_sq, m / 2.0), norm_sq};
}

// Degenerate when the part of Y in the numerically non-null eigenspace is round-off.
bool targets_vanish_on_range(const GramSpectrum& s) {
  double on_range = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s.eigenvalues(i) > s.threshold) on_range += s.rotated_targets(i) * s.rotated_targets(i);
  }
  return std::sqrt(on_range) <= 1e-12 * s.rotated_targets.norm();
}

double quadratic_form(const MatrixRef& gram, const VectorRef& a, Vector& ka) {
  ka = gram * a;
  const double q = a.dot(ka);
  if (q >= 0.0) return q;
  const double slack = 1e-12 * a.squaredNorm() * (1.0 + gram.cwiseAbs().maxCoeff());
  if (q < -slack) throw InvalidArgument("a^T K a is negative: K is not positive semidefinite");
  return 0.0;
}

void check_dual_args(const MatrixRef& gram, const VectorRef& targets, const VectorRef& a) {
  const Eigen::Index n = targets.size();
  if (gram.rows() != n || gram.cols() != n || a.size() != n) {
    throw InvalidArgument("dual objective: K, Y and a must have matching sizes");
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("m must be positive and finite");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive and finite");
  if (!(root.tolerance > 0.0)) throw InvalidArgument("root tolerance must be positive");
  if (root.max_iter < 1) throw InvalidArgument("root max_iter must be positive");
}

Vector rotated_coefficients(const GramSpectrum& spectrum, double lambda, double m, double c) {
  const double shift = lambda * m * static_cast<double>(spectrum.size()) * c;
  return (2.0 * spectrum.rotated_targets.array() / (2.0 * spectrum.eigenvalues.array() + shift)).matrix();
}

SpectralSolution solve_from_spectrum(const GramSpectrum& spectrum, const SolverConfig& config) {
  config.validate();
  SpectralSolution out;
  SolveReport& report = out.report;

  if (targets_vanish_on_range(spectrum)) {
    out.rotated_alpha = Vector::Zero(spectrum.size());
    report.degenerate = true;
    report.c0 = config.m == 2.0 ? 1.0 : 0.0;
    report.primal_objective = spectrum.rotated_targets.squaredNorm() / static_cast<double>(spectrum.size());
    report.notes.emplace_back("targets vanish on the range of K; returning f = 0");
    return out;
  }

  const auto problem = RootProblem::from_spectrum(spectrum, config.lambda, config.m);

  if (config.m > 1.0) {
    report.roots = find_root_unique(problem, config.root);
    const Root& r = report.roots.roots.front();
    out.rotated_alpha = rotated_coefficients(spectrum, config.lambda, config.m, r.value);
    report.c0 = r.value;
    report.residual = r.residual;
    report.newton_iterations = r.iterations;
    report.candidate_count = 1;
    report.primal_objective = spectral_objective(spectrum, out.rotated_alpha, config.lambda, config.m).primal;
    return out;
  }

  report.roots = find_roots_multistart(problem, config.root);
  report.candidate_count = static_cast<int>(report.roots.roots.size());
  for (const auto& t : report.roots.trajectories) report.newton_iterations += t.iterations;

  const Root* best = nullptr;
  Objective best_obj;
  for (const Root& r : report.roots.roots) {
    Vector coeffs = rotated_coefficients(spectrum, config.lambda, config.m, r.value);
    const Objective obj = spectral_objective(spectrum, coeffs, config.lambda, config.m);
    bool take = best == nullptr;
    if (!take) {
      const double tie = 1e-12 * (1.0 + std::abs(best_obj.primal));
      if (std::abs(obj.primal - best_obj.primal) <= tie) {
        std::ostringstream note;
        note.precision(17);
        note << "tie between roots C=" << best->value << " and C=" << r.value << " (objective " << obj.primal
             << "); keeping the smaller RKHS norm";
        report.notes.push_back(note.str());
        take = obj.norm_squared < best_obj.norm_squared;
      } else {
        take = obj.primal < best_obj.primal;
      }
    }
    if (take) {
      best = &r;
      best_obj = obj;
      out.rotated_alpha = std::move(coeffs);
    }
  }
  report.c0 = best->value;
  report.residual = best->residual;
  report.primal_objective = best_obj.primal;
  return out;
}

SpectralSolution krr_from_spectrum(const GramSpectrum& spectrum, double lambda2) {
  if (!(lambda2 > 0.0) || !std::isfinite(lambda2)) throw InvalidArgument("KRR lambda must be positive and finite");
  const double shift = lambda2 * static_cast<double>(spectrum.size());
  SpectralSolution out;
  out.rotated_alpha = (spectrum.rotated_targets.array() / (spectrum.eigenvalues.array() + shift)).matrix();
  out.report.c0 = 1.0;
  out.report.candidate_count = 1;
  out.report.degenerate = targets_vanish_on_range(spectrum);
  out.report.primal_objective = spectral_objective(spectrum, out.rotated_alpha, lambda2, 2.0).primal;
  return out;
}

Model assemble_model(const Dataset& train, const KernelSpec& kernel, const SolverConfig& config,
                     const GramSpectrum& spectrum, SpectralSolution solution) {
  Model model;
  model.alpha = to_original_basis(spectrum, solution.rotated_alpha);
  model.training_inputs = train.features();
  model.kernel = kernel;
  model.config = config;
  model.report = std::move(solution.report);
  return model;
}

Model fit_mrlsr(const Dataset& train, const KernelSpec& kernel, const SolverConfig& config) {
  config.validate();
  kernel.validate();
  const GramSpectrum spectrum = decompose(gram(train, kernel), train.targets());
  return assemble_model(train, kernel, config, spectrum, solve_from_spectrum(spectrum, config));
}

Model fit_krr(const Dataset& train, const KernelSpec& kernel, double lambda2) {
  kernel.validate();
  SolverConfig config;
  config.m = 2.0;
  config.lambda = lambda2;
  config.validate();
  const GramSpectrum spectrum = decompose(gram(train, kernel), train.targets());
  return assemble_model(train, kernel, config, spectrum, krr_from_spectrum(spectrum, lambda2));
}

Vector Model::predict(const MatrixRef& queries) const { return cross_gram(queries, training_inputs, kernel) * alpha; }

Vector predict(const Model& model, const MatrixRef& queries) { return model.predict(queries); }

double dual_objective(const MatrixRef& gram, const VectorRef& targets, const VectorRef& a, double lambda, double m) {
  check_dual_args(gram, targets, a);
  Vector ka;
  const double q = quadratic_form(gram, a, ka);
  const double n = static_cast<double>(targets.size());
  return (targets - ka).squaredNorm() + n * lambda * std::pow(q, m / 2.0);
}

Vector dual_gradient(const MatrixRef& gram, const VectorRef& targets, const VectorRef& a, double lambda, double m) {
  check_dual_args(gram, targets, a);
  Vector ka;
  const double q = quadratic_form(gram, a, ka);
  const double n = static_cast<double>(targets.size());
  Vector grad = -2.0 * (gram * (targets - ka));
  double power = 0.0;
  if (m == 2.0) {
    power = 1.0;
  } else if (q > 0.0) {
    power = std::pow(q, m / 2.0 - 1.0);
  } else if (m < 2.0 && !a.isZero(0.0)) {
    throw InvalidArgument("dual gradient is singular: a^T K a = 0 with a != 0 and m < 2");
  }
  grad += lambda * m * n * power * ka;
  return grad;
}

Vector stationarity_residual(const MatrixRef& gram, const VectorRef& targets, const VectorRef& alpha, double lambda,
                             double m) {
  check_dual_args(gram, targets, alpha);
  Vector ka;
  const double q = quadratic_form(gram, alpha, ka);
  const double n = static_cast<double>(targets.size());
  const double power = m == 2.0 ? 1.0 : (q > 0.0 ? std::pow(q, m / 2.0 - 1.0) : 0.0);
  return targets - ka - lambda * (m * n / 2.0) * power * alpha;
}

}  // namespace mrlsr
