#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kneecast/data/examples.hpp"

namespace kneecast::data {

enum class SplitKind { trial_80_20, half_half, leave_one_subject_out };

struct SplitPolicy {
  SplitKind kind = SplitKind::trial_80_20;
  bool shuffled = false;  // chronological otherwise
  std::uint64_t seed = 0;
  /// Subject sent to the second partition for leave_one_subject_out.
  std::string held_out_subject;

  /// Fraction of each trial that goes to the first partition.
  double ratio() const;
};

std::string_view to_string(SplitKind kind);
SplitKind parse_split_kind(std::string_view name);

/// Index partition: {train, validation} or {finetune, evaluation}.
struct SplitIndices {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

/// Ratio splits are applied per (subject, trial) so every trial contributes
/// to both sides; chronological order puts the earliest windows first.
SplitIndices split_examples(std::span<const PreprocessedExample> examples, const SplitPolicy& policy);

std::vector<PreprocessedExample> select(std::span<const PreprocessedExample> examples,
                                        std::span<const std::size_t> indices);

}  // namespace kneecast::data
