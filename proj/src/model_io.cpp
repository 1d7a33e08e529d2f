#include "mrlsr/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mrlsr {

using nlohmann::json;

std::string model_to_json(const Model& model) {
  json doc;
  doc["m"] = model.config.m;
  doc["lambda"] = model.config.lambda;
  doc["mu"] = model.kernel.bandwidth;
  doc["c0"] = model.report.c0;
  doc["residual"] = model.report.residual;
  doc["newton_iterations"] = model.report.newton_iterations;
  doc["alpha"] = std::vector<double>(model.alpha.data(), model.alpha.data() + model.alpha.size());
  json rows = json::array();
  for (Eigen::Index i = 0; i < model.training_inputs.rows(); ++i) {
    const Vector row = model.training_inputs.row(i).transpose();
    rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  doc["train_x"] = std::move(rows);
  return doc.dump() + "\n";
}

Model model_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    Model model;
    model.config.m = doc.at("m").get<double>();
    model.config.lambda = doc.at("lambda").get<double>();
    model.kernel.bandwidth = doc.at("mu").get<double>();
    model.report.c0 = doc.at("c0").get<double>();
    model.report.residual = doc.value("residual", 0.0);
    model.report.newton_iterations = doc.value("newton_iterations", 0);

    const auto alpha = doc.at("alpha").get<std::vector<double>>();
    const auto rows = doc.at("train_x").get<std::vector<std::vector<double>>>();
    if (alpha.size() != rows.size()) throw IoError("model: alpha and train_x lengths differ");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
    model.alpha = Eigen::Map<const Vector>(alpha.data(), n);
    model.training_inputs.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != p) throw IoError("model: ragged train_x");
      for (Eigen::Index j = 0; j < p; ++j) model.training_inputs(i, j) = row[static_cast<std::size_t>(j)];
    }
    model.config.validate();
    model.kernel.validate();
    return model;
  } catch (const json::exception& e) {
    throw IoError(std::string("model: malformed JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << model_to_json(model);
  if (!out) throw IoError("failed writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace mrlsr
