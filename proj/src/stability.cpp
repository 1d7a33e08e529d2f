#include "mrlsr/stability.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace mrlsr {

StabilityBound beta_bound(const StabilityInput& in) {
  if (!(in.m >= 2.0)) throw InvalidArgument("stability bound requires m >= 2");
  if (!(in.cy > 0.0) || !(in.kappa > 0.0) || !(in.lambda > 0.0) || in.n < 1) {
    throw InvalidArgument("stability bound requires positive cy, kappa, lambda and n");
  }
  StabilityBound b;
  b.lipschitz_const = 2.0 * (in.cy + in.kappa * std::pow(in.cy * in.cy / in.lambda, 1.0 / in.m));
  const double inner =
      std::pow(2.0, in.m - 2.0) * b.lipschitz_const * in.kappa / (in.lambda * static_cast<double>(in.n));
  b.beta = b.lipschitz_const * in.kappa * std::pow(inner, 1.0 / (in.m - 1.0));
  return b;
}

StabilityReport empirical_stability(const Dataset& train, const KernelSpec& kernel, const SolverConfig& config,
                                    const Dataset& probe) {
  config.validate();
  kernel.validate();
  if (!(config.m >= 2.0)) throw InvalidArgument("empirical stability check requires m >= 2");
  if (probe.dimension() != train.dimension()) throw InvalidArgument("probe dimension does not match training data");

  StabilityReport report;
  report.cy = std::max(train.targets().cwiseAbs().maxCoeff(), probe.targets().cwiseAbs().maxCoeff());
  report.kappa = 1.0 + 1e-12;
  if (!(report.cy > 0.0)) report.cy = 1e-300;  // all-zero targets: every fit is f = 0

  const auto bound = beta_bound({report.cy, report.kappa, config.lambda, config.m, train.size()});
  report.lipschitz_const = bound.lipschitz_const;
  report.beta = bound.beta;

  const Model full = fit_mrlsr(train, kernel, config);
  const Vector& y = probe.targets();
  const Vector full_loss = (y - full.predict(probe.features())).cwiseAbs2();

  const Eigen::Index n = train.size();
  std::vector<double> worst(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    Vector loo_pred = Vector::Zero(probe.size());
    if (n > 1) {
      std::vector<Eigen::Index> keep(static_cast<std::size_t>(n));
      std::iota(keep.begin(), keep.end(), Eigen::Index{0});
      keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(i));
      loo_pred = fit_mrlsr(train.subset(keep), kernel, config).predict(probe.features());
    }
    worst[i] = (full_loss - (y - loo_pred).cwiseAbs2()).cwiseAbs().maxCoeff();
  });

  for (Eigen::Index i = 0; i < n; ++i) {
    if (worst[static_cast<std::size_t>(i)] > report.empirical_max) {
      report.empirical_max = worst[static_cast<std::size_t>(i)];
      report.worst_index = i;
    }
  }
  report.satisfied = report.empirical_max <= report.beta;
  return report;
}

}  // namespace mrlsr
