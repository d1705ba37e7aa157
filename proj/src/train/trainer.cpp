#include "kneecast/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "kneecast/data/splits.hpp"
#include "kneecast/error.hpp"
#include "kneecast/parallel.hpp"
#include "kneecast/random.hpp"
#include "kneecast/train/early_stopping.hpp"

namespace kneecast::train {

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m, "train"); };
  if (batch_size == 0) fail("batch_size must be positive");
  if (max_epochs < 0) fail("max_epochs must be >= 0");
  if (patience < 1) fail("patience must be >= 1");
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) fail("base_lr must be positive");
  if (lr_scale != 1.0 && lr_scale != 0.2 && lr_scale != 0.1) fail("lr_scale must be one of 1.0, 0.2, 0.1");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.epsilon > 0.0)) {
    fail("adam betas must lie in [0, 1) and epsilon must be positive");
  }
  if (micro_batch == 0) fail("micro_batch must be positive");
}

std::string_view to_string(StopReason r) { return r == StopReason::early_stop ? "early_stop" : "max_epochs"; }

std::string to_json(const TrainHistory& h, int indent) {
  nlohmann::json j{{"train_loss", h.train_loss},
                   {"val_loss", h.val_loss},
                   {"learning_rate", h.learning_rate},
                   {"stop_reason", std::string(to_string(h.stop_reason))},
                   {"initial_train_loss", h.initial_train_loss},
                   {"initial_val_loss", h.initial_val_loss},
                   {"best_epoch", h.best_epoch},
                   {"best_val_loss", h.best_val_loss},
                   {"val_is_train", h.val_is_train}};
  return j.dump(indent);
}

double clip_gradients(model::Model& model, double max_norm) {
  double sq = 0.0;
  for (const auto& p : model.params) {
    if (!model.settings(p.group).trainable) continue;
    for (double g : p.tensor.grad) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& p : model.params) {
      if (!model.settings(p.group).trainable) continue;
      for (double& g : p.tensor.grad) g *= scale;
    }
  }
  return norm;
}

TrainHistory fit(model::Model& params, const Problem& problem, const TrainConfig& config) {
  config.validate();
  if (problem.n_train == 0) throw ConfigError("training set is empty", "train");
  TrainHistory h;
  h.val_is_train = !problem.validation_loss;
  h.initial_train_loss = problem.train_loss();
  h.initial_val_loss = h.val_is_train ? h.initial_train_loss : problem.validation_loss();
  if (!std::isfinite(h.initial_train_loss) || !std::isfinite(h.initial_val_loss)) {
    throw NumericError("initial loss is not finite");
  }

  const std::size_t batch = std::min(config.batch_size, problem.n_train);
  const double lr = config.learning_rate();
  AdamState state = AdamState::for_model(params);
  EarlyStopper stopper(config.patience);
  std::vector<std::vector<double>> best;
  auto snapshot = [&] {
    best.clear();
    for (const auto& p : params.params) best.push_back(p.tensor.values);
  };
  snapshot();

  std::vector<std::size_t> order(problem.n_train);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.shuffle) {
      Rng rng(derive_seed(config.seed, "epoch:" + std::to_string(epoch)));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      const double loss = problem.gradient(std::span<const std::size_t>(order).subspan(start, n));
      if (!std::isfinite(loss)) {
        throw NumericError("training loss became non-finite in epoch " + std::to_string(epoch));
      }
      loss_sum += loss * static_cast<double>(n);
      clip_gradients(params, config.clip_norm);
      adam_step(params, state, lr, config.adam);
    }
    const double train_loss = loss_sum / static_cast<double>(order.size());
    const double val_loss = h.val_is_train ? train_loss : problem.validation_loss();
    if (!std::isfinite(val_loss)) {
      throw NumericError("validation loss became non-finite in epoch " + std::to_string(epoch));
    }
    h.train_loss.push_back(train_loss);
    h.val_loss.push_back(val_loss);
    h.learning_rate.push_back(lr);
    const bool stop = stopper.update(val_loss);
    if (stopper.improved()) snapshot();
    if (stop) {
      h.stop_reason = StopReason::early_stop;
      break;
    }
  }
  for (std::size_t i = 0; i < params.params.size(); ++i) params.params[i].tensor.values = best[i];
  h.best_epoch = stopper.best_epoch();
  h.best_val_loss = h.best_epoch > 0 ? stopper.best_loss() : h.initial_val_loss;
  return h;
}

namespace {

struct ChunkResult {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;
};

}  // namespace

double compute_gradients(model::Model& model, std::span<const data::PreprocessedExample> examples,
                         std::span<const std::size_t> indices, std::size_t micro_batch) {
  if (indices.empty()) throw ConfigError("gradient batch is empty", "train");
  micro_batch = std::max<std::size_t>(micro_batch, 1);
  std::unordered_map<const ad::Tensor*, std::size_t> slot;
  for (std::size_t i = 0; i < model.params.size(); ++i) slot[&model.params[i].tensor] = i;

  const std::size_t n_chunks = (indices.size() + micro_batch - 1) / micro_batch;
  std::vector<ChunkResult> results(n_chunks);
  parallel_for(n_chunks, [&](std::size_t c) {
    const std::size_t begin = c * micro_batch;
    const auto idx = indices.subspan(begin, std::min(micro_batch, indices.size() - begin));
    const model::Batch batch = model::make_batch(model, examples, idx);
    ad::Graph g;
    const auto nodes = model::build_forward(g, model, batch);
    const auto target = g.input(model::normalized_targets(model, examples, idx));
    const auto loss = g.mse(nodes.output, target);
    g.backward(loss);
    auto& r = results[c];
    r.loss = g.scalar(loss);
    r.grads.resize(model.params.size());
    for (ad::NodeId id : g.parameter_nodes()) {
      const auto grad = g.grad(id);
      if (grad.empty()) continue;
      r.grads[slot.at(g.bound_tensor(id))].assign(grad.begin(), grad.end());
    }
  });

  const double total = static_cast<double>(indices.size());
  for (auto& p : model.params) p.tensor.zero_grad();
  double loss = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t n = std::min(micro_batch, indices.size() - c * micro_batch);
    const double w = static_cast<double>(n) / total;
    loss += w * results[c].loss;
    for (std::size_t i = 0; i < model.params.size(); ++i) {
      const auto& g = results[c].grads[i];
      if (g.empty()) continue;
      auto& dst = model.params[i].tensor.grad;
      for (std::size_t k = 0; k < g.size(); ++k) dst[k] += w * g[k];
    }
  }
  return loss;
}

double dataset_loss(const model::Model& model, std::span<const data::PreprocessedExample> examples,
                    std::size_t micro_batch) {
  if (examples.empty()) throw ConfigError("cannot compute the loss of an empty set", "train");
  micro_batch = std::max<std::size_t>(micro_batch, 1);
  const std::size_t n_chunks = (examples.size() + micro_batch - 1) / micro_batch;
  std::vector<double> sums(n_chunks, 0.0);
  auto& shared = const_cast<model::Model&>(model);
  parallel_for(n_chunks, [&](std::size_t c) {
    const std::size_t begin = c * micro_batch;
    const std::size_t n = std::min(micro_batch, examples.size() - begin);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), begin);
    const model::Batch batch = model::make_batch(model, examples, idx);
    ad::Graph g;
    const auto nodes = model::build_forward(g, shared, batch);
    const auto target = model::normalized_targets(model, examples, idx);
    const auto out = g.value(nodes.output);
    double s = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) s += (out[k] - target.values[k]) * (out[k] - target.values[k]);
    sums[c] = s;
  });
  double total = 0.0;
  for (double s : sums) total += s;
  return total / static_cast<double>(examples.size() * static_cast<std::size_t>(model.hyper.horizon));
}

void fit_target_stats(model::Model& model, std::span<const data::PreprocessedExample> train_set) {
  if (model.target_stats.fitted || model.frame() != model::TargetFrame::dataset) return;
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& ex : train_set) {
    for (double y : ex.target) {
      sum += y;
      ++n;
    }
  }
  if (n == 0) throw ConfigError("training set has no targets", "train");
  const double mean = sum / static_cast<double>(n);
  for (const auto& ex : train_set) {
    for (double y : ex.target) sq += (y - mean) * (y - mean);
  }
  model.target_stats = {mean, std::max(std::sqrt(sq / static_cast<double>(n)), signal::kStdFloor), true};
}

TrainHistory train(model::Model& model, std::span<const data::PreprocessedExample> train_set,
                   std::span<const data::PreprocessedExample> val_set, const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) throw ConfigError("training set is empty", "train");
  fit_target_stats(model, train_set);
  Problem p;
  p.n_train = train_set.size();
  p.gradient = [&](std::span<const std::size_t> idx) {
    return compute_gradients(model, train_set, idx, config.micro_batch);
  };
  p.train_loss = [&] { return dataset_loss(model, train_set); };
  if (!val_set.empty()) p.validation_loss = [&] { return dataset_loss(model, val_set); };
  return fit(model, p, config);
}

FinetuneResult finetune(model::Model& model, std::span<const data::PreprocessedExample> finetune_set,
                        std::span<const data::PreprocessedExample> eval_set, const TrainConfig& config) {
  config.validate();
  if (finetune_set.empty()) throw ConfigError("fine-tuning set is empty", "train");
  if (config.lr_scale != 0.1 && config.lr_scale != 0.2) {
    throw ConfigError("fine-tuning lr_scale must be 0.1 or 0.2", "train");
  }
  FinetuneResult r;
  r.zero_shot = metrics::evaluate_model(model, eval_set).model;
  std::vector<data::PreprocessedExample> grad_set, val_set;
  if (finetune_set.size() >= 10) {
    data::SplitPolicy policy;
    policy.kind = data::SplitKind::trial_80_20;
    const auto split = data::split_examples(finetune_set, policy);
    grad_set = data::select(finetune_set, split.first);
    val_set = data::select(finetune_set, split.second);
  } else {
    grad_set.assign(finetune_set.begin(), finetune_set.end());
  }
  r.n_gradient_examples = grad_set.size();
  r.n_validation_examples = val_set.size();
  r.history = train(model, grad_set, val_set, config);
  r.report = metrics::evaluate_model(model, eval_set).model;
  return r;
}

}  // namespace kneecast::train
