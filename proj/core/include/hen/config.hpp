#pragma once

#include "hen/experiment.hpp"

#include <filesystem>
#include <string_view>

namespace hen {

/// Applies the keys present in a JSON object on top of `base`. Unknown keys
/// are rejected. Keys use the snake_case field names of ExperimentConfig;
/// codecs are spec strings ("projection:252", "precomputed:table.henb").
ExperimentConfig config_from_json(std::string_view json_text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

}  // namespace hen
