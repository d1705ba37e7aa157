#pragma once

#include <span>
#include <string>
#include <vector>

#include "kneecast/data/recording.hpp"
#include "kneecast/scenario.hpp"
#include "kneecast/signal/preprocess.hpp"

namespace kneecast::data {

/// Prediction horizons supported end to end (100 Hz steps).
bool is_supported_horizon(int horizon);

/// One network-ready window and the knee angles that follow it.
struct PreprocessedExample {
  signal::PreprocessedWindow inputs;
  std::vector<double> target;  // degrees, horizon values at the output rate
  int horizon = 1;
  std::size_t window_start = 0;  // input sample index of the first window sample
  double end_time_ms = 0.0;
  double last_observed_deg = 0.0;  // raw knee angle at inputs.end_index
  std::string subject_id;
  std::string trial_id;

  /// Index of the first target sample in the source recording.
  std::size_t first_target_index(std::size_t decimation) const { return inputs.end_index + decimation; }
};

/// Identity of an example across datasets, used for leakage checks.
std::string example_key(const PreprocessedExample& ex);

/// Windows a recording. With `horizon` = 0 no targets are attached and every
/// complete window is kept (prediction-time use).
std::vector<PreprocessedExample> make_examples(const Recording& recording, Scenario scenario, int horizon,
                                               const signal::PreprocessConfig& config);

}  // namespace kneecast::data
