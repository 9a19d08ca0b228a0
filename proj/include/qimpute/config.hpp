#pragma once

#include "qimpute/pipeline.hpp"

#include <json.hpp>

#include <filesystem>

namespace qimpute {

// Fills a PipelineConfig from JSON. Absent keys keep their defaults; unknown
// keys and wrong types are ConfigErrors. The seed may be left out here and
// supplied later (validate() rejects a config without one).
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Complete echo of every field, suitable for config_from_json.
nlohmann::json config_to_json(const PipelineConfig& cfg);

} // namespace qimpute
