#pragma once

#include <cstddef>
#include <vector>

#include "kneecast/autodiff/graph.hpp"

namespace kneecast::ad {

struct ParameterCheck {
  NodeId node = 0;
  std::size_t checked = 0;
  /// Elements whose +/- perturbation flips the sign of some relu input.
  std::size_t skipped = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<ParameterCheck> parameters;
  double max_rel_error = 0.0;
  bool passed = false;
};

/// Compares reverse-mode gradients of `loss` with central differences
/// (step `epsilon`) for every element of every bound parameter. Relative
/// error is |g_ad - g_fd| / max(|g_ad|, |g_fd|, 1e-8). Parameter values are
/// restored afterwards. Throws NumericError naming the node when any
/// gradient is non-finite.
GradCheckReport grad_check(Graph& graph, NodeId loss, double tolerance = 1e-4, double epsilon = 1e-5);

}  // namespace kneecast::ad
