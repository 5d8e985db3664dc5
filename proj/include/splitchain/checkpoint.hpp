#pragma once

#include <filesystem>
#include <string>

#include "splitchain/nn.hpp"

namespace splitchain::nn {

// Versioned text checkpoint. Weights are written row-major with shortest
// round-trip decimals, so save/load reproduces every bit.
std::string serialize_model(const FfnnModel& model);
FfnnModel deserialize_model(const std::string& text);

void save_model(const FfnnModel& model, const std::filesystem::path& path);
FfnnModel load_model(const std::filesystem::path& path);

std::string_view to_string(Activation activation);

}  // namespace splitchain::nn
