#include "kneecast/train/adam.hpp"

#include <cmath>

#include "kneecast/error.hpp"

namespace kneecast::train {

AdamState AdamState::for_model(const model::Model& model) {
  AdamState s;
  for (const auto& p : model.params) {
    s.m.emplace_back(p.tensor.size(), 0.0);
    s.v.emplace_back(p.tensor.size(), 0.0);
  }
  return s;
}

double adam_update(double& param, double grad, double& m, double& v, std::int64_t t, double lr,
                   const AdamConfig& c) {
  m = c.beta1 * m + (1.0 - c.beta1) * grad;
  v = c.beta2 * v + (1.0 - c.beta2) * grad * grad;
  const double m_hat = m / (1.0 - std::pow(c.beta1, static_cast<double>(t)));
  const double v_hat = v / (1.0 - std::pow(c.beta2, static_cast<double>(t)));
  const double delta = -lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
  param += delta;
  return delta;
}

void adam_step(model::Model& model, AdamState& state, double lr, const AdamConfig& config) {
  if (state.m.size() != model.params.size()) state = AdamState::for_model(model);
  for (const auto& p : model.params) {
    if (!model.settings(p.group).trainable) continue;
    for (double g : p.tensor.grad) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient for parameter '" + p.name + "'");
    }
  }
  ++state.step;
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    auto& p = model.params[i];
    const auto& gs = model.settings(p.group);
    if (!gs.trainable || gs.lr_scale == 0.0 || !p.tensor.has_grad()) continue;
    const double group_lr = lr * gs.lr_scale;
    for (std::size_t k = 0; k < p.tensor.size(); ++k) {
      adam_update(p.tensor.values[k], p.tensor.grad[k], state.m[i][k], state.v[i][k], state.step, group_lr, config);
    }
  }
}

}  // namespace kneecast::train
