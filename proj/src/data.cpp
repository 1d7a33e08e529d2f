#include "mrlsr/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>

namespace mrlsr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_real(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || end != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

Dataset::Dataset(Matrix features, Vector targets, std::string name)
    : features_(std::move(features)), targets_(std::move(targets)), name_(std::move(name)) {
  if (targets_.size() < 1) throw InvalidArgument("dataset must contain at least one row");
  if (features_.rows() != targets_.size()) {
    throw InvalidArgument("dataset has " + std::to_string(features_.rows()) + " feature rows but " +
                          std::to_string(targets_.size()) + " targets");
  }
  if (!features_.allFinite() || !targets_.allFinite()) {
    throw InvalidArgument("dataset contains non-finite values");
  }
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  Matrix x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    if (r < 0 || r >= size()) throw InvalidArgument("row index out of range");
    x.row(static_cast<Eigen::Index>(i)) = features_.row(r);
    y(static_cast<Eigen::Index>(i)) = targets_(r);
  }
  return Dataset(std::move(x), std::move(y), name_);
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.dimension() != b.dimension()) throw InvalidArgument("cannot concatenate datasets of different dimension");
  Matrix x(a.size() + b.size(), a.dimension());
  x << a.features(), b.features();
  Vector y(a.size() + b.size());
  y << a.targets(), b.targets();
  return Dataset(std::move(x), std::move(y), a.name());
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t arity = 0;
};

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);

    if (first) {
      first = false;
      table.arity = cells.size();
      const bool numeric = std::all_of(cells.begin(), cells.end(), [](auto c) { return parse_real(c).has_value(); });
      if (!numeric) {
        for (auto c : cells) table.header.emplace_back(c);
        continue;
      }
    }

    if (cells.size() != table.arity) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                    " columns, expected " + std::to_string(table.arity));
    }
    std::vector<double> values(table.arity);
    for (std::size_t c = 0; c < table.arity; ++c) {
      const auto v = parse_real(cells[c]);
      if (!v) {
        const std::string column = table.header.empty() ? std::to_string(c + 1) : "'" + table.header[c] + "'";
        throw IoError(path.string() + ": non-numeric cell at row " + std::to_string(table.rows.size() + 1) +
                      " (line " + std::to_string(line_no) + "), column " + column + ": '" + std::string(cells[c]) +
                      "'");
      }
      values[c] = *v;
    }
    table.rows.push_back(std::move(values));
  }

  if (table.rows.empty()) throw IoError(path.string() + ": no data rows");
  return table;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const TargetColumn& target) {
  const CsvTable table = read_csv_table(path);
  const std::size_t arity = table.arity;

  std::size_t target_index = 0;
  if (const auto* name = std::get_if<std::string>(&target)) {
    const auto it = std::find(table.header.begin(), table.header.end(), *name);
    if (it == table.header.end()) throw IoError(path.string() + ": no column named '" + *name + "'");
    target_index = static_cast<std::size_t>(it - table.header.begin());
  } else {
    const long idx = std::get<long>(target);
    const long resolved = idx < 0 ? static_cast<long>(arity) + idx : idx;
    if (resolved < 0 || resolved >= static_cast<long>(arity)) {
      throw IoError(path.string() + ": target column index " + std::to_string(idx) + " out of range");
    }
    target_index = static_cast<std::size_t>(resolved);
  }
  if (arity < 2) throw IoError(path.string() + ": need at least one feature column besides the target");

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto p = static_cast<Eigen::Index>(arity - 1);
  Matrix x(n, p);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == target_index) {
        y(i) = row[c];
      } else {
        x(i, col++) = row[c];
      }
    }
  }
  try {
    return Dataset(std::move(x), std::move(y), path.stem().string());
  } catch (const InvalidArgument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Matrix load_features_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv_table(path);
  Matrix x(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.arity));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  if (!x.allFinite()) throw IoError(path.string() + ": non-finite values");
  return x;
}

std::string format_real(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (Eigen::Index j = 0; j < data.dimension(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dimension(); ++j) out << format_real(data.features()(i, j)) << ',';
    out << format_real(data.targets()(i)) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

double synthetic_response(const VectorRef& x) {
  if (x.size() < 5) throw InvalidArgument("synthetic response needs at least 5 inputs");
  return 10.0 * std::sin(std::numbers::pi * x(0) * x(1)) + 20.0 * (x(2) - 0.5) * (x(2) - 0.5) + 10.0 * x(3) +
         5.0 * x(4);
}

Dataset generate_synthetic(Eigen::Index n, std::uint64_t seed, SyntheticOptions options) {
  if (n < 1) throw InvalidArgument("synthetic dataset size must be positive");
  constexpr Eigen::Index kInputs = 10;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix x(n, kInputs);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < kInputs; ++j) x(i, j) = uniform(rng);
    y(i) = synthetic_response(x.row(i).transpose());
    if (options.noise) y(i) += gauss(rng);
  }
  return Dataset(std::move(x), std::move(y), "synthetic");
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  // Fisher-Yates with an explicit bounded draw; std::shuffle's draw pattern is library specific.
  std::mt19937_64 rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(r % bound)]);
  }
  return idx;
}

SplitIndices split_indices(Eigen::Index n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<Eigen::Index>(std::llround(static_cast<double>(n) * spec.train_fraction));
  if (n_train < 1 || n_train >= n) throw InvalidArgument("split leaves an empty part for n=" + std::to_string(n));
  const auto perm = shuffled_indices(n, spec.seed);
  SplitIndices out;
  out.train.assign(perm.begin(), perm.begin() + n_train);
  out.test.assign(perm.begin() + n_train, perm.end());
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  const auto idx = split_indices(data.size(), spec);
  return {data.subset(idx.train), data.subset(idx.test)};
}

std::vector<SplitIndices> k_fold_indices(Eigen::Index n, const SplitSpec& spec) {
  const Eigen::Index k = spec.fold_count;
  if (k < 1) throw InvalidArgument("fold count must be positive");
  if (k > n) throw InvalidArgument("fold count " + std::to_string(k) + " exceeds dataset size " + std::to_string(n));
  const auto perm = shuffled_indices(n, spec.seed);

  std::vector<SplitIndices> folds(static_cast<std::size_t>(k));
  const Eigen::Index base = n / k;
  const Eigen::Index extra = n % k;
  Eigen::Index start = 0;
  for (Eigen::Index f = 0; f < k; ++f) {
    const Eigen::Index len = base + (f < extra ? 1 : 0);
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.test.assign(perm.begin() + start, perm.begin() + start + len);
    fold.train.reserve(static_cast<std::size_t>(n - len));
    fold.train.insert(fold.train.end(), perm.begin(), perm.begin() + start);
    fold.train.insert(fold.train.end(), perm.begin() + start + len, perm.end());
    start += len;
  }
  return folds;
}

std::vector<std::pair<Dataset, Dataset>> k_fold(const Dataset& data, const SplitSpec& spec) {
  std::vector<std::pair<Dataset, Dataset>> out;
  for (const auto& fold : k_fold_indices(data.size(), spec)) {
    out.emplace_back(data.subset(fold.train), data.subset(fold.test));
  }
  return out;
}

Standardizer Standardizer::fit(const Dataset& train) {
  const Matrix& x = train.features();
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.scale = ((x.rowwise() - s.mean.transpose()).array().square().colwise().sum() / static_cast<double>(x.rows()))
                .sqrt()
                .transpose();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (!(s.scale(j) > 0.0)) s.scale(j) = 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const MatrixRef& features) const {
  if (features.cols() != mean.size()) throw InvalidArgument("standardizer dimension mismatch");
  return (features.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Dataset Standardizer::apply(const Dataset& data) const {
  return Dataset(apply(data.features()), data.targets(), data.name());
}

}  // namespace mrlsr
