#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mrlsr/solver.hpp"

namespace mrlsr {

/// JSON document {"m", "lambda", "mu", "c0", "residual", "newton_iterations",
/// "alpha": [...], "train_x": [[...], ...]}. Reals use shortest round-trip form,
/// so a save/load cycle reproduces every coefficient bit for bit.
std::string model_to_json(const Model& model);
Model model_from_json(std::string_view text);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace mrlsr
