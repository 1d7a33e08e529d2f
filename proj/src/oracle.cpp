#include "mrlsr/oracle.hpp"

#include <random>

#include "mrlsr/solver.hpp"

namespace mrlsr {

OracleResult minimize_dual(const MatrixRef& gram, const VectorRef& targets, double lambda, double m,
                           const OracleConfig& config) {
  const Eigen::Index n = targets.size();
  if (n > 50) throw InvalidArgument("oracle is limited to n <= 50");
  if (!(m > 1.0)) throw InvalidArgument("oracle requires m > 1");
  if (!(config.step_size > 0.0) || config.max_steps < 1 || !(config.gradient_tolerance > 0.0)) {
    throw InvalidArgument("oracle configuration values must be positive");
  }

  constexpr int kMaxHalvings = 40;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> noise(-1e-3, 1e-3);

  OracleResult out;
  out.a = Vector::NullaryExpr(n, [&] { return noise(rng); });
  out.objective = dual_objective(gram, targets, out.a, lambda, m);

  while (out.steps < config.max_steps) {
    const Vector g = dual_gradient(gram, targets, out.a, lambda, m);
    out.gradient_norm = g.cwiseAbs().maxCoeff();
    if (out.gradient_norm <= config.gradient_tolerance) {
      out.converged = true;
      return out;
    }
    double step = config.step_size;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
      Vector candidate = out.a - step * g;
      const double f = dual_objective(gram, targets, candidate, lambda, m);
      if (f < out.objective) {
        out.a = std::move(candidate);
        out.objective = f;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (out.steps == 0) throw NumericalError("oracle line search failed: objective does not decrease");
      out.stalled = true;
      return out;
    }
    ++out.steps;
  }
  out.gradient_norm = dual_gradient(gram, targets, out.a, lambda, m).cwiseAbs().maxCoeff();
  out.converged = out.gradient_norm <= config.gradient_tolerance;
  return out;
}

}  // namespace mrlsr
