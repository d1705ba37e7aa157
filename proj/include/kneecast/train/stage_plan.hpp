#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kneecast/data/examples.hpp"
#include "kneecast/metrics/metrics.hpp"
#include "kneecast/model/model.hpp"
#include "kneecast/train/trainer.hpp"
#include "kneecast/train/transfer.hpp"

namespace kneecast::train {

enum class StageKind { primary_train, sic_to_dic, population_adapt, subject_finetune };
std::string_view to_string(StageKind k);
StageKind parse_stage_kind(std::string_view name);

/// One step of a transfer-learning workflow. Data sets are referenced by
/// name into StagePlan::datasets.
struct Stage {
  std::string name;
  StageKind kind = StageKind::primary_train;
  /// Stage whose model this one starts from; empty only for primary_train.
  std::string from;
  std::string train_data;
  std::string validation_data;  // optional
  std::string eval_data;        // optional for training stages
  double lr_scale = 1.0;
  std::optional<int> max_epochs;
  /// Groups whose parameters stay fixed during this stage.
  std::vector<model::Group> frozen;
  /// Architecture for primary_train and sic_to_dic; horizon may differ per stage.
  std::optional<Scenario> scenario;
  std::optional<int> horizon;
};

struct StagePlan {
  std::vector<Stage> stages;
  std::map<std::string, std::vector<data::PreprocessedExample>> datasets;
  model::ModelHyper hyper;
  signal::PreprocessConfig preprocess;
  TrainConfig train;
  std::uint64_t seed = 0;
  /// Checkpoints are written here as <stage>.ckpt when set.
  std::filesystem::path checkpoint_dir;
};

struct StageArtifact {
  std::string stage;
  model::Model model;
  TrainHistory history;
  std::optional<metrics::MetricsReport> metrics;
  std::optional<metrics::MetricsReport> zero_shot;
  std::optional<GraftReport> graft;
  std::filesystem::path checkpoint;
};

/// Throws ConfigError on unknown references, duplicate names, cycles
/// ("plan") or any example shared between a stage's gradient data and its
/// evaluation data ("leakage"). Returns the execution order.
std::vector<std::size_t> validate_plan(const StagePlan& plan);

/// Validates the whole plan, then runs stages in dependency order.
std::vector<StageArtifact> run_stage_plan(const StagePlan& plan);

}  // namespace kneecast::train
