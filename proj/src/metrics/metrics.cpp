#include "kneecast/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kneecast/error.hpp"

namespace kneecast::metrics {

namespace {

struct Sums {
  double abs = 0.0;
  double sq = 0.0;
  double total = 0.0;
};

Sums accumulate(std::span<const double> pred, std::span<const double> truth, std::size_t n, std::size_t stride,
                std::size_t offset) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += truth[i * stride + offset];
  mean /= static_cast<double>(n);
  Sums s;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = truth[i * stride + offset];
    const double e = pred[i * stride + offset] - y;
    s.abs += std::abs(e);
    s.sq += e * e;
    s.total += (y - mean) * (y - mean);
  }
  return s;
}

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json report_json(const MetricsReport& r) {
  nlohmann::json j{{"nmae", number(r.nmae)},
                   {"nrmse", number(r.nrmse)},
                   {"r2", number(r.r2)},
                   {"normalization_range_deg", r.normalization_range_deg},
                   {"n_examples", r.n_examples},
                   {"horizon", r.horizon}};
  auto steps = nlohmann::json::array();
  for (const auto& s : r.per_step) {
    steps.push_back({{"nmae", number(s.nmae)}, {"nrmse", number(s.nrmse)}, {"r2", number(s.r2)}});
  }
  j["per_step"] = steps;
  return j;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

MetricsReport evaluate_metrics(std::span<const double> pred, std::span<const double> truth, std::size_t n,
                               std::size_t horizon) {
  if (horizon == 0 || pred.size() != n * horizon || truth.size() != n * horizon) {
    throw DataError("metrics: prediction has " + std::to_string(pred.size()) + " values, truth " +
                        std::to_string(truth.size()) + ", expected " + std::to_string(n) + "x" +
                        std::to_string(horizon),
                    "shape");
  }
  if (n < 2) throw DataError("metrics need at least 2 examples", "shape");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!std::isfinite(pred[i]) || !std::isfinite(truth[i])) {
      throw NumericError("metrics: non-finite value at flat index " + std::to_string(i));
    }
  }
  const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw DataError("metrics undefined: evaluation truth is constant", "undefined_metric");

  MetricsReport r;
  r.normalization_range_deg = range;
  r.n_examples = n;
  r.horizon = horizon;
  const std::size_t total = n * horizon;
  const Sums all = accumulate(pred, truth, total, 1, 0);
  r.nmae = all.abs / static_cast<double>(total) / range;
  r.nrmse = std::sqrt(all.sq / static_cast<double>(total)) / range;
  r.r2 = 1.0 - all.sq / all.total;
  if (horizon > 1) {
    for (std::size_t h = 0; h < horizon; ++h) {
      const Sums s = accumulate(pred, truth, n, horizon, h);
      StepMetrics m;
      m.nmae = s.abs / static_cast<double>(n) / range;
      m.nrmse = std::sqrt(s.sq / static_cast<double>(n)) / range;
      m.r2 = s.total > 0.0 ? 1.0 - s.sq / s.total : std::numeric_limits<double>::quiet_NaN();
      r.per_step.push_back(m);
    }
  }
  return r;
}

std::vector<double> stack_targets(std::span<const data::PreprocessedExample> examples) {
  std::vector<double> out;
  for (const auto& ex : examples) out.insert(out.end(), ex.target.begin(), ex.target.end());
  return out;
}

std::vector<double> persistence_predictions(std::span<const data::PreprocessedExample> examples) {
  std::vector<double> out;
  for (const auto& ex : examples) out.insert(out.end(), ex.target.size(), ex.last_observed_deg);
  return out;
}

Evaluation evaluate_model(const model::Model& model, std::span<const data::PreprocessedExample> examples) {
  Evaluation e;
  e.prediction = model::forward(model, examples);
  const auto truth = stack_targets(examples);
  if (truth.size() != e.prediction.degrees.size()) {
    throw ConfigError("evaluation examples have horizon " +
                          std::to_string(examples.empty() ? 0 : examples.front().target.size()) +
                          ", model predicts " + std::to_string(model.hyper.horizon),
                      "horizon");
  }
  e.model = evaluate_metrics(e.prediction.degrees, truth, examples.size(), e.prediction.horizon);
  e.persistence = evaluate_metrics(persistence_predictions(examples), truth, examples.size(), e.prediction.horizon);
  return e;
}

std::string to_json(const MetricsReport& report, int indent) { return report_json(report).dump(indent); }

std::string to_json(const Evaluation& evaluation, int indent) {
  nlohmann::json j = report_json(evaluation.model);
  j["persistence_baseline"] = report_json(evaluation.persistence);
  return j.dump(indent);
}

std::string format_table(const MetricsReport& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10s\n", "step", "NMAE", "NRMSE", "R2");
  os << line;
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10s\n", "all", fmt(r.nmae).c_str(), fmt(r.nrmse).c_str(),
                fmt(r.r2).c_str());
  os << line;
  for (std::size_t h = 0; h < r.per_step.size(); ++h) {
    const auto& s = r.per_step[h];
    std::snprintf(line, sizeof line, "%-10zu %10s %10s %10s\n", h + 1, fmt(s.nmae).c_str(), fmt(s.nrmse).c_str(),
                  fmt(s.r2).c_str());
    os << line;
  }
  std::snprintf(line, sizeof line, "range %.4f deg, %zu examples, horizon %zu\n", r.normalization_range_deg,
                r.n_examples, r.horizon);
  os << line;
  return os.str();
}

std::string format_table(const Evaluation& e) {
  std::ostringstream os;
  os << format_table(e.model);
  char line[160];
  std::snprintf(line, sizeof line, "persistence baseline: NMAE %s NRMSE %s R2 %s\n", fmt(e.persistence.nmae).c_str(),
                fmt(e.persistence.nrmse).c_str(), fmt(e.persistence.r2).c_str());
  os << line;
  return os.str();
}

std::string plot_csv(std::span<const data::PreprocessedExample> examples, const model::Prediction& prediction) {
  std::ostringstream os;
  const std::size_t h = prediction.horizon;
  os << "end_time_ms";
  for (std::size_t j = 1; j <= h; ++j) os << ",truth_" << j;
  for (std::size_t j = 1; j <= h; ++j) os << ",pred_" << j;
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < examples.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.0f", examples[i].end_time_ms);
    os << buf;
    for (std::size_t j = 0; j < h; ++j) {
      std::snprintf(buf, sizeof buf, ",%.6f", j < examples[i].target.size() ? examples[i].target[j] : 0.0);
      os << buf;
    }
    for (std::size_t j = 0; j < h; ++j) {
      std::snprintf(buf, sizeof buf, ",%.6f", prediction.at(i, j));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace kneecast::metrics
