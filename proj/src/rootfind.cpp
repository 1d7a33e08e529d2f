#include "mrlsr/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mrlsr {

namespace {

struct SumAndSlope {
  double sum = 0.0;
  double slope = 0.0;
};

SumAndSlope sum_and_slope(const RootProblem& p, double c) {
  const double a = p.scale();
  SumAndSlope out;
  for (Eigen::Index i = 0; i < p.n(); ++i) {
    const double d = p.eigenvalues(i);
    if (d == 0.0) continue;
    const double y = p.rotated_targets(i);
    const double denom = 2.0 * d + a * c;
    const double term = 4.0 * d * y * y / (denom * denom);
    out.sum += term;
    out.slope += term / denom;
  }
  out.slope *= -2.0 * a;
  return out;
}

void check_argument(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("F is defined for finite C >= 0");
}

// Iterations aim for |F| <= tol; once no further progress is possible the
// scaled bound is accepted, since near large C adjacent doubles give F values
// further apart than tol.
bool polished(const RootOptions& o, double f) { return std::abs(f) <= o.tolerance; }
bool acceptable(const RootOptions& o, double c, double f) { return std::abs(f) <= o.tolerance * std::max(1.0, c); }

}  // namespace

RootProblem RootProblem::from_spectrum(const GramSpectrum& spectrum, double lambda, double m) {
  RootProblem p{spectrum.eigenvalues, spectrum.rotated_targets, lambda, m};
  p.validate();
  return p;
}

void RootProblem::validate() const {
  if (eigenvalues.size() != rotated_targets.size() || eigenvalues.size() == 0) {
    throw InvalidArgument("root problem needs equal, non-zero lengths of eigenvalues and rotated targets");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive and finite");
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("m must be positive and finite");
  if ((eigenvalues.array() < 0.0).any()) throw InvalidArgument("eigenvalues must be non-negative");
}

double weighted_sum(const RootProblem& problem, double c) { return sum_and_slope(problem, c).sum; }

double eval_F(const RootProblem& problem, double c) {
  check_argument(c);
  if (problem.m == 2.0) return 1.0 - c;
  const double exponent = problem.m / 2.0 - 1.0;
  const double s = weighted_sum(problem, c);
  if (s == 0.0) {
    if (exponent < 0.0) throw NumericalError("S(C) = 0 with m < 2: targets vanish on the range of the Gram matrix");
    return -c;
  }
  return std::pow(s, exponent) - c;
}

double eval_F_prime(const RootProblem& problem, double c) {
  check_argument(c);
  if (problem.m == 2.0) return -1.0;
  const double exponent = problem.m / 2.0 - 1.0;
  const auto [s, ds] = sum_and_slope(problem, c);
  if (s == 0.0) {
    if (exponent < 0.0) throw NumericalError("S(C) = 0 with m < 2: targets vanish on the range of the Gram matrix");
    return -1.0;
  }
  return exponent * std::pow(s, exponent - 1.0) * ds - 1.0;
}

RootFindError::RootFindError(const std::string& what, RootReport report)
    : NumericalError(what + "\n" + report.describe()), report_(std::move(report)) {}

std::string RootReport::describe() const {
  std::ostringstream out;
  out.precision(10);
  out << (method == RootMethod::kNewtonUnique ? "safeguarded Newton" : "multi-start Newton");
  if (method == RootMethod::kNewtonUnique) out << ", bracket [" << bracket_low << ", " << bracket_high << "]";
  out << '\n';
  for (const auto& t : trajectories) {
    out << "  start " << t.start << " -> C=" << t.end << " |F|=" << t.residual << " after " << t.iterations
        << " iterations" << (t.converged ? " (converged)" : " (failed)") << '\n';
  }
  return out.str();
}

RootReport find_root_unique(const RootProblem& problem, const RootOptions& options) {
  problem.validate();
  if (problem.m <= 1.0) throw InvalidArgument("find_root_unique requires m > 1");

  RootReport report;
  report.method = RootMethod::kNewtonUnique;

  double lo = 0.0;
  double hi = 1.0;
  double f_hi = eval_F(problem, hi);
  while (f_hi > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("could not bracket the root of F");
    f_hi = eval_F(problem, hi);
  }

  RootTrajectory traj;
  traj.start = hi;
  double x = hi;
  double fx = f_hi;
  bool done = polished(options, fx);

  while (!done && traj.iterations < options.max_iter) {
    if (fx > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = eval_F_prime(problem, x);
    double next = x - fx / slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    ++traj.iterations;

    if (next <= lo || next >= hi) {
      // Bracket has collapsed to adjacent doubles; keep the better end point.
      const double f_lo = eval_F(problem, lo);
      const double f_hi2 = eval_F(problem, hi);
      x = std::abs(f_lo) <= std::abs(f_hi2) ? lo : hi;
      fx = std::abs(f_lo) <= std::abs(f_hi2) ? f_lo : f_hi2;
      break;
    }
    x = next;
    fx = eval_F(problem, x);
    done = polished(options, fx);
  }
  const bool converged = acceptable(options, x, fx);

  traj.end = x;
  traj.residual = std::abs(fx);
  traj.converged = converged;
  report.trajectories.push_back(traj);
  report.bracket_low = fx > 0.0 ? x : lo;
  report.bracket_high = fx > 0.0 ? hi : x;
  if (!converged) throw RootFindError("Newton iteration did not converge within " + std::to_string(options.max_iter) +
                                          " iterations",
                                      report);
  report.roots.push_back(Root{x, std::abs(fx), traj.iterations, traj.start, 1});
  return report;
}

std::vector<double> multistart_values() {
  std::vector<double> starts(10);
  for (int k = 0; k < 10; ++k) starts[static_cast<std::size_t>(k)] = std::pow(10.0, 4.0 * k / 9.0);
  starts.front() = 1.0;
  starts.back() = 1e4;
  return starts;
}

RootReport find_roots_multistart(const RootProblem& problem, const RootOptions& options) {
  problem.validate();
  if (problem.m > 1.0) throw InvalidArgument("find_roots_multistart is for 0 < m <= 1");

  constexpr int kMaxHalvings = 30;
  RootReport report;
  report.method = RootMethod::kMultiStart;

  for (const double start : multistart_values()) {
    RootTrajectory traj;
    traj.start = start;
    double x = start;
    double fx = eval_F(problem, x);
    bool done = polished(options, fx);
    while (!done && traj.iterations < options.max_iter) {
      const double slope = eval_F_prime(problem, x);
      if (slope == 0.0 || !std::isfinite(slope)) break;
      const double step = fx / slope;
      double t = 1.0;
      bool accepted = false;
      double next = x;
      double f_next = fx;
      for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
        next = x - t * step;
        if (!(next >= 0.0) || !std::isfinite(next)) continue;
        f_next = eval_F(problem, next);
        if (std::abs(f_next) < std::abs(fx)) {
          accepted = true;
          break;
        }
      }
      ++traj.iterations;
      if (!accepted) break;
      x = next;
      fx = f_next;
      done = polished(options, fx);
    }
    traj.converged = acceptable(options, x, fx);
    traj.end = x;
    traj.residual = std::abs(fx);
    report.trajectories.push_back(traj);

    if (!traj.converged) continue;
    auto same = std::find_if(report.roots.begin(), report.roots.end(), [&](const Root& r) {
      return std::abs(r.value - x) <= 1e-8 * (1.0 + std::abs(x));
    });
    if (same != report.roots.end()) {
      ++same->hits;
    } else {
      report.roots.push_back(Root{x, traj.residual, traj.iterations, start, 1});
    }
  }

  if (report.roots.empty()) throw RootFindError("no multi-start Newton run converged", report);
  std::sort(report.roots.begin(), report.roots.end(), [](const Root& a, const Root& b) { return a.value < b.value; });
  return report;
}

}  // namespace mrlsr
