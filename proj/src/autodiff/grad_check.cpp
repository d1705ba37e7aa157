#include "kneecast/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "kneecast/error.hpp"

namespace kneecast::ad {

namespace {

// Sign pattern of every relu input: identifies which linear piece is active.
std::vector<signed char> relu_signature(const Graph& g) {
  std::vector<signed char> sig;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (g.op(i) != Op::relu) continue;
    for (double v : g.value(g.inputs(i)[0])) sig.push_back(static_cast<signed char>((v > 0.0) - (v < 0.0)));
  }
  return sig;
}

}  // namespace

GradCheckReport grad_check(Graph& graph, NodeId loss, double tolerance, double epsilon) {
  graph.forward();
  graph.backward(loss);
  for (NodeId i = 0; i <= loss; ++i) {
    for (double v : graph.grad(i)) {
      if (!std::isfinite(v)) {
        throw NumericError("non-finite gradient at node #" + std::to_string(i) + " (" +
                           std::string(to_string(graph.op(i))) + ")");
      }
    }
  }

  const auto base_signature = relu_signature(graph);
  GradCheckReport report;
  for (NodeId id : graph.parameter_nodes()) {
    Tensor* param = graph.bound_tensor(id);
    const auto g = graph.grad(id);
    std::vector<double> analytic(param->values.size(), 0.0);
    if (!g.empty()) std::copy(g.begin(), g.end(), analytic.begin());

    ParameterCheck check;
    check.node = id;
    for (std::size_t e = 0; e < param->values.size(); ++e) {
      const double saved = param->values[e];
      param->values[e] = saved + epsilon;
      graph.forward();
      const double plus = graph.scalar(loss);
      const bool plus_kink = relu_signature(graph) != base_signature;
      param->values[e] = saved - epsilon;
      graph.forward();
      const double minus = graph.scalar(loss);
      const bool minus_kink = relu_signature(graph) != base_signature;
      param->values[e] = saved;
      if (plus_kink || minus_kink) {
        ++check.skipped;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double denom = std::max({std::abs(analytic[e]), std::abs(numeric), 1e-8});
      check.max_rel_error = std::max(check.max_rel_error, std::abs(analytic[e] - numeric) / denom);
      ++check.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.parameters.push_back(check);
  }
  graph.forward();
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace kneecast::ad
