#include "mrlsr/equivalence.hpp"

#include <cmath>
#include <fstream>

namespace mrlsr {

double matched_lambda2(double m, double c0, double lambda) { return 0.5 * m * c0 * lambda; }

double equivalent_lambda2(const Model& model) {
  if (!(model.config.m > 1.0)) {
    throw InvalidArgument("the M-RLSR/KRR lambda mapping only exists for m > 1");
  }
  return matched_lambda2(model.config.m, model.report.c0, model.config.lambda);
}

bool EquivalenceReport::calibration_ok() const {
  return !parts.empty() && parts.front().alpha_diff <= 1e-8 && parts.front().rkhs_diff <= 1e-8;
}

EquivalenceReport run_z_equivalence_experiment(const Dataset& data, double m, double lambda, Eigen::Index parts,
                                               std::uint64_t seed, std::optional<KernelSpec> kernel) {
  if (!(m > 1.0)) throw InvalidArgument("Z-equivalence experiment requires m > 1");
  if (parts < 1) throw InvalidArgument("need at least one part");
  SolverConfig config;
  config.m = m;
  config.lambda = lambda;
  config.validate();

  SplitSpec spec;
  spec.seed = seed;
  spec.fold_count = parts;
  const auto folds = k_fold_indices(data.size(), spec);

  std::vector<Dataset> subsets;
  subsets.reserve(folds.size());
  for (const auto& f : folds) subsets.push_back(data.subset(f.test));

  EquivalenceReport report;
  report.m = m;
  report.lambda = lambda;
  const KernelSpec k = kernel ? *kernel : KernelSpec{bandwidth_heuristic(subsets.front())};
  k.validate();
  report.bandwidth = k.bandwidth;

  std::vector<GramSpectrum> spectra(subsets.size());
  parallel_for(subsets.size(), [&](std::size_t i) {
    spectra[i] = decompose(gram(subsets[i], k), subsets[i].targets());
  });

  const SpectralSolution calibration = solve_from_spectrum(spectra.front(), config);
  report.lambda2 = matched_lambda2(m, calibration.report.c0, lambda);

  report.parts.resize(subsets.size());
  parallel_for(subsets.size(), [&](std::size_t i) {
    const GramSpectrum& s = spectra[i];
    const SpectralSolution mrlsr = i == 0 ? calibration : solve_from_spectrum(s, config);
    const SpectralSolution krr = krr_from_spectrum(s, report.lambda2);
    const Vector rotated_delta = mrlsr.rotated_alpha - krr.rotated_alpha;
    PartDifference& part = report.parts[i];
    part.label = "Z" + std::to_string(i + 1);
    part.size = s.size();
    part.c0 = mrlsr.report.c0;
    part.alpha_diff = to_original_basis(s, rotated_delta).norm();
    part.rkhs_diff = std::sqrt(std::max(0.0, s.eigenvalues.dot(rotated_delta.cwiseAbs2())));
  });
  return report;
}

void write_equivalence_csv(const std::filesystem::path& path, const EquivalenceReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "part,size,c0,alpha_diff,rkhs_diff\n";
  for (const auto& p : report.parts) {
    out << p.label << ',' << p.size << ',' << format_real(p.c0) << ',' << format_real(p.alpha_diff) << ','
        << format_real(p.rkhs_diff) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mrlsr
