#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kneecast/data/examples.hpp"
#include "kneecast/metrics/metrics.hpp"
#include "kneecast/model/model.hpp"
#include "kneecast/train/adam.hpp"

namespace kneecast::train {

struct TrainConfig {
  std::size_t batch_size = 2000;  // clipped to the training-set size
  int max_epochs = 60;
  int patience = 5;
  double base_lr = 1e-3;
  double lr_scale = 1.0;  // one of 1.0, 0.2, 0.1
  AdamConfig adam;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables clipping
  std::size_t micro_batch = 32;
  bool shuffle = true;
  std::uint64_t seed = 0;

  void validate() const;
  double learning_rate() const { return base_lr * lr_scale; }
};

enum class StopReason { early_stop, max_epochs };
std::string_view to_string(StopReason r);

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> learning_rate;
  StopReason stop_reason = StopReason::max_epochs;
  double initial_train_loss = 0.0;
  double initial_val_loss = 0.0;
  int best_epoch = 0;  // 1-based, 0 when no epoch ran
  double best_val_loss = 0.0;
  /// True when validation fell back to the training loss.
  bool val_is_train = false;

  std::size_t epochs() const { return train_loss.size(); }
};

std::string to_json(const TrainHistory& history, int indent = 2);

/// Generic optimization problem over the parameters held by a Model.
struct Problem {
  std::size_t n_train = 0;
  /// Writes mean-loss gradients for the given training indices into every
  /// parameter's Tensor::grad and returns that loss.
  std::function<double(std::span<const std::size_t>)> gradient;
  /// Mean loss over the whole training set (no gradients).
  std::function<double()> train_loss;
  /// Validation loss; empty to use the epoch's training loss.
  std::function<double()> validation_loss;
};

/// Adam with per-group learning-rate scales, global-norm clipping, early
/// stopping on a strict minimum and restoration of the best epoch.
TrainHistory fit(model::Model& params, const Problem& problem, const TrainConfig& config);

/// Scales trainable gradients so their global norm is at most max_norm.
/// Returns the norm before clipping.
double clip_gradients(model::Model& model, double max_norm);

/// Mean squared error in the normalized target frame with gradients written
/// to Tensor::grad. Micro-batches run in parallel and are reduced in order.
double compute_gradients(model::Model& model, std::span<const data::PreprocessedExample> examples,
                         std::span<const std::size_t> indices, std::size_t micro_batch = 32);

/// Normalized-frame mean squared error over a whole set.
double dataset_loss(const model::Model& model, std::span<const data::PreprocessedExample> examples,
                    std::size_t micro_batch = 64);

/// Fits dataset target statistics (mean, deviation in degrees) when the
/// model uses them and they have not been fitted yet.
void fit_target_stats(model::Model& model, std::span<const data::PreprocessedExample> train_set);

/// Trains on standardized targets. An empty validation set falls back to the
/// training loss for early stopping.
TrainHistory train(model::Model& model, std::span<const data::PreprocessedExample> train_set,
                   std::span<const data::PreprocessedExample> val_set, const TrainConfig& config);

struct FinetuneResult {
  TrainHistory history;
  metrics::MetricsReport zero_shot;
  metrics::MetricsReport report;
  std::size_t n_gradient_examples = 0;
  std::size_t n_validation_examples = 0;
};

/// Continues training at lr_scale 0.1 or 0.2. With at least 10 fine-tuning
/// examples the last 20% of each trial is held out for early stopping.
FinetuneResult finetune(model::Model& model, std::span<const data::PreprocessedExample> finetune_set,
                        std::span<const data::PreprocessedExample> eval_set, const TrainConfig& config);

}  // namespace kneecast::train
