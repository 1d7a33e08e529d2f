#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mrlsr/equivalence.hpp"
#include "test_support.hpp"

namespace mrlsr {
namespace {

TEST(MatchedLambda2, Formula) {
  EXPECT_DOUBLE_EQ(matched_lambda2(3.0, 0.5, 0.2), 0.15);
  EXPECT_DOUBLE_EQ(matched_lambda2(2.0, 1.0, 0.7), 0.7);
}

TEST(EquivalentLambda2, KrrReproducesCoefficients) {
  for (double m : {1.2, 1.5, 2.5, 4.0}) {
    const Dataset d = testing::random_dataset(20, 3, static_cast<std::uint64_t>(m * 10));
    const KernelSpec k = testing::heuristic_kernel(d);
    const Model model = fit_mrlsr(d, k, {m, 0.02, {}});
    const Model krr = fit_krr(d, k, equivalent_lambda2(model));
    EXPECT_LT((krr.alpha - model.alpha).cwiseAbs().maxCoeff(), 1e-8) << "m=" << m;
  }
}

TEST(EquivalentLambda2, UndefinedForSmallExponent) {
  const Dataset d = testing::random_dataset(10, 2, 1);
  const Model model = fit_mrlsr(d, testing::heuristic_kernel(d), {0.8, 0.1, {}});
  EXPECT_THROW(equivalent_lambda2(model), InvalidArgument);
}

TEST(ZEquivalence, CalibrationPartAgreesOthersDiffer) {
  const Dataset d = generate_synthetic(400, 5);
  const EquivalenceReport r = run_z_equivalence_experiment(d, 1.2, 1e-3, 4, 9);
  ASSERT_EQ(r.parts.size(), 4u);
  EXPECT_TRUE(r.calibration_ok());
  EXPECT_EQ(r.parts[0].label, "Z1");
  Eigen::Index total = 0;
  for (const auto& p : r.parts) total += p.size;
  EXPECT_EQ(total, 400);
  EXPECT_NEAR(r.lambda2, matched_lambda2(1.2, r.parts[0].c0, 1e-3), 1e-15);
  double worst = 0.0;
  for (std::size_t i = 1; i < r.parts.size(); ++i) worst = std::max(worst, r.parts[i].rkhs_diff);
  EXPECT_GT(worst, 1e-6);
}

TEST(ZEquivalence, CsvLayoutAndArgumentChecks) {
  const Dataset d = generate_synthetic(60, 2);
  const EquivalenceReport r = run_z_equivalence_experiment(d, 1.5, 0.01, 3, 1);
  const auto path = std::filesystem::temp_directory_path() / "mrlsr_test_zequiv.csv";
  write_equivalence_csv(path, r);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "part,size,c0,alpha_diff,rkhs_diff");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 3);

  EXPECT_THROW(run_z_equivalence_experiment(d, 0.9, 0.01, 3, 1), InvalidArgument);
  EXPECT_THROW(run_z_equivalence_experiment(d, 1.5, 0.01, 0, 1), InvalidArgument);
}

}  // namespace
}  // namespace mrlsr
