#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kneecast/data/examples.hpp"
#include "kneecast/scenario.hpp"

namespace kneecast::io {

inline constexpr std::uint32_t kExampleCacheVersion = 1;

/// Preprocessed examples as written by `kneecast preprocess`. The format is
/// described in docs/example_cache.md.
struct ExampleCache {
  Scenario scenario = Scenario::SIC;
  int horizon = 1;
  signal::PreprocessConfig preprocess;
  std::vector<data::PreprocessedExample> examples;
};

std::string serialize_examples(const ExampleCache& cache);
ExampleCache deserialize_examples(std::string_view bytes);

void save_examples(const ExampleCache& cache, const std::filesystem::path& path);
ExampleCache load_examples(const std::filesystem::path& path);

/// True when the file starts with the cache magic.
bool is_example_cache(const std::filesystem::path& path);

}  // namespace kneecast::io
