#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kneecast/data/splits.hpp"
#include "kneecast/model/model.hpp"
#include "kneecast/train/stage_plan.hpp"
#include "kneecast/train/trainer.hpp"

namespace kneecast::io {

/// Everything a run needs, as read from a `--config` JSON file. Omitted
/// fields keep their defaults.
struct RunConfig {
  Scenario scenario = Scenario::SIC;
  int horizon = 1;
  std::uint64_t seed = 0;
  signal::PreprocessConfig preprocess;
  model::ModelHyper hyper;
  train::TrainConfig train;
  data::SplitPolicy split;
  /// Named data sets, each a list of CSV recordings or example caches.
  std::map<std::string, std::vector<std::string>> data;
  std::vector<train::Stage> stages;
  std::string output_dir = "kneecast_out";
};

/// The published JSON schema (docs/run_config.schema.json).
std::string_view run_config_schema();

/// Violations of `schema` by `document`, as "path: message" strings. Covers
/// the keywords the published schema uses: type, enum, minimum, maximum,
/// exclusiveMinimum, exclusiveMaximum, properties, required,
/// additionalProperties, items, minItems and local $ref.
std::vector<std::string> schema_violations(std::string_view document, std::string_view schema);

/// Validates against the schema, then applies semantic checks. Throws
/// ConfigError("schema") listing every violation.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace kneecast::io
