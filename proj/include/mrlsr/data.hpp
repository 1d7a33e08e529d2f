#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mrlsr/core.hpp"

namespace mrlsr {

/// Labeled sample set: one row of `features` per entry of `targets`.
///
/// Construction validates the shape (n >= 1, rows == targets) and rejects
/// non-finite entries, so every Dataset in circulation is well formed.
class Dataset {
 public:
  Dataset(Matrix features, Vector targets, std::string name = {});

  const Matrix& features() const { return features_; }
  const Vector& targets() const { return targets_; }
  const std::string& name() const { return name_; }

  Eigen::Index size() const { return targets_.size(); }
  Eigen::Index dimension() const { return features_.cols(); }

  /// Rows selected by index, in the given order.
  Dataset subset(std::span<const Eigen::Index> rows) const;

 private:
  Matrix features_;
  Vector targets_;
  std::string name_;
};

/// Concatenates rows of `a` then `b`; dimensions must agree.
Dataset concat(const Dataset& a, const Dataset& b);

/// Column selector for CSV ingestion: header name or zero-based index.
/// A negative index counts from the end (-1 is the last column).
using TargetColumn = std::variant<std::string, long>;

/// Reads a comma-separated file. The first line is treated as a header when any
/// of its cells fails to parse as a real number.
Dataset load_csv(const std::filesystem::path& path, const TargetColumn& target);

/// Every column as a feature (no target), same header rule as load_csv.
Matrix load_features_csv(const std::filesystem::path& path);

/// Writes features then the target as the last column, with a header row
/// (x1..xp,y) and shortest round-trip decimal formatting.
void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);

struct SyntheticOptions {
  bool noise = true;
};

/// Ten inputs uniform on [0,1];
/// y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5 + N(0,1).
Dataset generate_synthetic(Eigen::Index n, std::uint64_t seed, SyntheticOptions options = {});

/// Noise-free target for one 10-dimensional input row.
double synthetic_response(const VectorRef& x);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  Eigen::Index fold_count = 10;
};

/// Deterministic seeded permutation of 0..n-1.
std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, std::uint64_t seed);

struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

SplitIndices split_indices(Eigen::Index n, const SplitSpec& spec);

/// Random train/test partition; the train part holds round(n * train_fraction) rows.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

/// Partition of 0..n-1 into `fold_count` shuffled folds; the first n % k folds
/// receive one extra element.
std::vector<SplitIndices> k_fold_indices(Eigen::Index n, const SplitSpec& spec);

/// (train, validation) pairs, one per fold.
std::vector<std::pair<Dataset, Dataset>> k_fold(const Dataset& data, const SplitSpec& spec);

/// Per-column affine map fitted on a training set. Constant columns keep unit scale.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Dataset& train);
  Matrix apply(const MatrixRef& features) const;
  Dataset apply(const Dataset& data) const;
};

}  // namespace mrlsr
