#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "kneecast/error.hpp"
#include "kneecast/metrics/metrics.hpp"
#include "support.hpp"

using namespace kneecast;
using metrics::evaluate_metrics;

TEST_SUITE_BEGIN("metrics");

namespace {

// Integer-valued truth spanning exactly [10, 50].
std::vector<double> ramp_truth(std::size_t n, std::size_t horizon) {
  std::vector<double> t(n * horizon);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 10.0 + static_cast<double>(i % 41);
  t.front() = 10.0;
  t.back() = 50.0;
  return t;
}

std::string category_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  return "";
}

}  // namespace

TEST_CASE("perfect prediction") {
  const auto truth = ramp_truth(30, 5);
  const auto r = evaluate_metrics(truth, truth, 30, 5);
  CHECK(r.nmae == 0.0);
  CHECK(r.nrmse == 0.0);
  CHECK(r.r2 == 1.0);
  CHECK(r.normalization_range_deg == 40.0);
  REQUIRE(r.per_step.size() == 5);
  for (const auto& s : r.per_step) CHECK(s.nmae == 0.0);
}

TEST_CASE("constant two-degree offset over a forty-degree range") {
  const auto truth = ramp_truth(100, 1);
  auto pred = truth;
  for (auto& p : pred) p += 2.0;
  const auto r = evaluate_metrics(pred, truth, 100, 1);
  CHECK(r.nmae == 0.05);
  CHECK(r.nrmse == 0.05);
  CHECK(r.r2 < 1.0);
  CHECK(r.per_step.empty());
}

TEST_CASE("mean predictor has zero r2") {
  std::vector<double> truth{10.0, 20.0, 30.0, 40.0, 50.0, 30.0};  // mean 30
  std::vector<double> pred(truth.size(), 30.0);
  const auto r = evaluate_metrics(pred, truth, 3, 2);
  CHECK(r.r2 == 0.0);
}

TEST_CASE("errors") {
  std::vector<double> flat(6, 3.0), ok{1, 2, 3, 4, 5, 6};
  CHECK(category_of([&] { evaluate_metrics(flat, flat, 3, 2); }) == "undefined_metric");
  CHECK(category_of([&] { evaluate_metrics(ok, std::span(ok).first(4), 3, 2); }) == "shape");
  CHECK(category_of([&] { evaluate_metrics(ok, ok, 2, 2); }) == "shape");
  CHECK(category_of([&] { evaluate_metrics(std::span(ok).first(1), std::span(ok).first(1), 1, 1); }) == "shape");
  auto bad = ok;
  bad[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(evaluate_metrics(bad, ok, 3, 2), NumericError);
}

TEST_CASE("nrmse is never below nmae") {
  testing::Gen g(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = g.index(2, 40), h = g.index(1, 6);
    auto truth = g.normals(n * h, g.real(0.1, 30.0));
    truth[0] += 1.0;  // never constant
    auto pred = truth;
    const double scale = g.real(0.0, 10.0);
    for (auto& p : pred) p += scale * g.real(-1.0, 1.0) * (g.real(0.0, 1.0) < 0.2 ? 10.0 : 1.0);
    const auto r = evaluate_metrics(pred, truth, n, h);
    REQUIRE(r.nrmse >= r.nmae);
    for (const auto& s : r.per_step) REQUIRE(s.nrmse >= s.nmae);
  }
}

TEST_CASE("metrics are invariant to joint positive scaling") {
  testing::Gen g(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = g.index(2, 20), h = g.index(1, 4);
    auto truth = g.normals(n * h, 10.0);
    truth[0] += 1.0;
    auto pred = g.normals(n * h, 10.0);
    const double c = std::pow(2.0, static_cast<double>(g.index(0, 8)) - 4.0);  // exact scaling
    auto ts = truth, ps = pred;
    for (auto& v : ts) v *= c;
    for (auto& v : ps) v *= c;
    const auto a = evaluate_metrics(pred, truth, n, h), b = evaluate_metrics(ps, ts, n, h);
    REQUIRE(a.nmae == doctest::Approx(b.nmae).epsilon(1e-12));
    REQUIRE(a.nrmse == doctest::Approx(b.nrmse).epsilon(1e-12));
    REQUIRE(a.r2 == doctest::Approx(b.r2).epsilon(1e-12));
  }
}

TEST_CASE("per-step metrics average to the pooled nmae") {
  testing::Gen g(9);
  const std::size_t n = 25, h = 7;
  auto truth = g.normals(n * h, 20.0);
  auto pred = g.normals(n * h, 20.0);
  const auto r = evaluate_metrics(pred, truth, n, h);
  double mean = 0.0;
  for (const auto& s : r.per_step) mean += s.nmae / static_cast<double>(h);
  CHECK(mean == doctest::Approx(r.nmae).epsilon(1e-12));
}

TEST_CASE("persistence repeats the last observed angle") {
  auto spec = testing::small_subject(4, 6, false);
  const auto rec = data::synthesize_subject(spec);
  const auto ex = data::make_examples(rec, Scenario::SIC, 26, {});
  const auto p = metrics::persistence_predictions(ex);
  REQUIRE(p.size() == ex.size() * 26);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    for (std::size_t k = 0; k < 26; ++k) CHECK(p[i * 26 + k] == rec.knee_angle_deg[ex[i].inputs.end_index]);
  }
  CHECK(metrics::stack_targets(ex).size() == ex.size() * 26);
}

TEST_CASE("report formats") {
  const auto truth = ramp_truth(10, 2);
  auto pred = truth;
  pred[3] += 1.0;
  const auto r = evaluate_metrics(pred, truth, 10, 2);
  const auto j = metrics::to_json(r);
  CHECK(j.find("\"nmae\"") != std::string::npos);
  CHECK(j.find("\"per_step\"") != std::string::npos);
  const auto t = metrics::format_table(r);
  CHECK(t.find("NMAE") != std::string::npos);

  model::Prediction pr;
  pr.batch = 2;
  pr.horizon = 1;
  pr.degrees = {1.0, 2.0};
  std::vector<data::PreprocessedExample> ex(2);
  ex[0].target = {1.5};
  ex[1].target = {2.5};
  ex[0].end_time_ms = 1999.0;
  ex[1].end_time_ms = 2199.0;
  const auto csv = metrics::plot_csv(ex, pr);
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

TEST_SUITE_END();
