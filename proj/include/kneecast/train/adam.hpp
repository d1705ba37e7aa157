#pragma once

#include <cstdint>
#include <vector>

#include "kneecast/model/model.hpp"

namespace kneecast::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moments per parameter tensor, aligned with Model::params.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t step = 0;

  static AdamState for_model(const model::Model& model);
};

/// Single-value Adam update at timestep t >= 1. Returns the applied delta.
double adam_update(double& param, double grad, double& m, double& v, std::int64_t t, double lr,
                   const AdamConfig& config);

/// One optimizer step over every parameter using Tensor::grad. Each group
/// moves with learning rate lr * lr_scale(group); frozen groups and groups
/// with zero scale are left untouched, moments included. Throws NumericError
/// naming the tensor when a gradient is non-finite.
void adam_step(model::Model& model, AdamState& state, double lr, const AdamConfig& config = {});

}  // namespace kneecast::train
