#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kneecast/data/examples.hpp"
#include "kneecast/model/model.hpp"

namespace kneecast::metrics {

struct StepMetrics {
  double nmae = 0.0;
  double nrmse = 0.0;
  double r2 = 0.0;  // NaN when the step's truth is constant
};

/// Errors are normalized by the peak-to-peak range of the evaluation truth.
struct MetricsReport {
  double nmae = 0.0;
  double nrmse = 0.0;
  double r2 = 0.0;
  double normalization_range_deg = 0.0;
  std::size_t n_examples = 0;
  std::size_t horizon = 0;
  std::vector<StepMetrics> per_step;  // filled when horizon > 1
};

/// `pred` and `truth` are n x horizon, row-major, in degrees.
MetricsReport evaluate_metrics(std::span<const double> pred, std::span<const double> truth, std::size_t n,
                               std::size_t horizon);

/// Row-major targets of a set of examples.
std::vector<double> stack_targets(std::span<const data::PreprocessedExample> examples);

/// Last-observed-angle predictor repeated over the horizon.
std::vector<double> persistence_predictions(std::span<const data::PreprocessedExample> examples);

struct Evaluation {
  MetricsReport model;
  MetricsReport persistence;
  model::Prediction prediction;
};

Evaluation evaluate_model(const model::Model& model, std::span<const data::PreprocessedExample> examples);

std::string to_json(const MetricsReport& report, int indent = 2);
std::string to_json(const Evaluation& evaluation, int indent = 2);
/// Aligned plain-text table.
std::string format_table(const MetricsReport& report);
std::string format_table(const Evaluation& evaluation);

/// Truth versus prediction over time, one row per example:
/// end_time_ms, truth_1..truth_H, pred_1..pred_H.
std::string plot_csv(std::span<const data::PreprocessedExample> examples, const model::Prediction& prediction);

}  // namespace kneecast::metrics
