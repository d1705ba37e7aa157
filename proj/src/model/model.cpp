#include "kneecast/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kneecast/error.hpp"
#include "kneecast/random.hpp"

namespace kneecast::model {

std::string_view to_string(Group g) {
  switch (g) {
    case Group::emg_branch: return "emg_branch";
    case Group::kinematic_branch: return "kinematic_branch";
    case Group::force_branch: return "force_branch";
    case Group::head: return "head";
  }
  return "?";
}

Group parse_group(std::string_view name) {
  for (Group g : kGroups) {
    if (to_string(g) == name) return g;
  }
  throw ConfigError("unknown parameter group '" + std::string(name) + "'", "group");
}

void ModelHyper::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m, "hyper"); };
  if (!data::is_supported_horizon(horizon)) fail("horizon must be 1, 26 or 50");
  if (conv1.stride * conv2.stride != 4) fail("conv strides must multiply to 4");
  if (input_length == 0 || input_length % 4 != 0) fail("input_length must be a positive multiple of 4");
  if (emg_feature_dim != conv2.filters) fail("emg_feature_dim must equal conv2.filters");
  for (std::size_t v : {conv1.filters, conv1.kernel, conv2.filters, conv2.kernel, lstm1_hidden, lstm2_hidden,
                        kin_lstm_hidden, attn_dim, force_feature_dim}) {
    if (v == 0) fail("all layer sizes must be positive");
  }
}

Parameter* Model::find(std::string_view name) {
  for (auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Parameter* Model::find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Parameter& Model::at(std::string_view name) {
  if (auto* p = find(name)) return *p;
  throw ConfigError("model has no parameter '" + std::string(name) + "'", "parameter");
}

const Parameter& Model::at(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw ConfigError("model has no parameter '" + std::string(name) + "'", "parameter");
}

namespace {

constexpr std::array<std::string_view, kEmgChannels> kChannelPrefix{"emg.bf", "emg.rf", "emg.st", "emg.vm"};

}  // namespace

std::vector<TensorDecl> declare_parameters(Scenario scenario, const ModelHyper& h) {
  h.validate();
  std::vector<TensorDecl> d;
  const std::size_t f1 = h.conv1.filters, f2 = h.conv2.filters;
  for (auto prefix : kChannelPrefix) {
    const std::string p(prefix);
    d.push_back({p + ".conv1.w", Group::emg_branch, {h.conv1.kernel, 1, f1}});
    d.push_back({p + ".conv1.b", Group::emg_branch, {f1}});
    d.push_back({p + ".conv2.w", Group::emg_branch, {h.conv2.kernel, f1, f2}});
    d.push_back({p + ".conv2.b", Group::emg_branch, {f2}});
  }
  const std::size_t g1 = 4 * h.lstm1_hidden, g2 = 4 * h.lstm2_hidden;
  if (uses_kinematics(scenario)) {
    const std::size_t gk = 4 * h.kin_lstm_hidden;
    d.push_back({"kin.lstm.wx", Group::kinematic_branch, {4, gk}});
    d.push_back({"kin.lstm.wh", Group::kinematic_branch, {h.kin_lstm_hidden, gk}});
    d.push_back({"kin.lstm.b", Group::kinematic_branch, {gk}});
    d.push_back({"attn.wq", Group::kinematic_branch, {h.kin_lstm_hidden, h.attn_dim}});
    d.push_back({"attn.bq", Group::kinematic_branch, {h.attn_dim}});
    d.push_back({"attn.wk", Group::kinematic_branch, {f2, h.attn_dim}});
    d.push_back({"attn.bk", Group::kinematic_branch, {h.attn_dim}});
    d.push_back({"attn.wv", Group::kinematic_branch, {f2, h.attn_dim}});
    d.push_back({"attn.bv", Group::kinematic_branch, {h.attn_dim}});
    d.push_back({"lstm1.wx_fused", Group::kinematic_branch, {h.kin_lstm_hidden + h.attn_dim, g1}});
  }
  d.push_back({"lstm1.wx_emg", Group::head, {kEmgChannels * f2, g1}});
  d.push_back({"lstm1.wh", Group::head, {h.lstm1_hidden, g1}});
  d.push_back({"lstm1.b", Group::head, {g1}});
  d.push_back({"lstm2.wx", Group::head, {h.lstm1_hidden, g2}});
  d.push_back({"lstm2.wh", Group::head, {h.lstm2_hidden, g2}});
  d.push_back({"lstm2.b", Group::head, {g2}});
  const auto horizon = static_cast<std::size_t>(h.horizon);
  if (uses_forces(scenario)) {
    d.push_back({"force.conv1.w", Group::force_branch, {h.conv1.kernel, kForceChannels, f1}});
    d.push_back({"force.conv1.b", Group::force_branch, {f1}});
    d.push_back({"force.conv2.w", Group::force_branch, {h.conv2.kernel, f1, h.force_feature_dim}});
    d.push_back({"force.conv2.b", Group::force_branch, {h.force_feature_dim}});
    d.push_back({"dense.w_force", Group::force_branch, {h.force_feature_dim, horizon}});
  }
  d.push_back({"dense.w_hidden", Group::head, {h.lstm2_hidden, horizon}});
  d.push_back({"dense.b", Group::head, {horizon}});
  return d;
}

ad::Tensor init_parameter(const TensorDecl& decl, const ModelHyper& h, std::uint64_t seed) {
  ad::Tensor t = ad::Tensor::zeros(decl.shape, true);
  const std::string& n = decl.name;
  auto ends_with = [&](std::string_view suffix) {
    return n.size() >= suffix.size() && n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  auto hidden_of = [&]() -> std::size_t {
    if (n.rfind("kin.lstm", 0) == 0) return h.kin_lstm_hidden;
    if (n.rfind("lstm1", 0) == 0) return h.lstm1_hidden;
    return h.lstm2_hidden;
  };
  const bool is_lstm = n.find("lstm") != std::string::npos;

  if (is_lstm && ends_with(".b")) {
    // Gate order i, f, g, o; forget gate starts open.
    const std::size_t hidden = hidden_of();
    for (std::size_t j = hidden; j < 2 * hidden; ++j) t.values[j] = 1.0;
    return t;
  }
  if (decl.shape.size() == 1) return t;  // remaining biases start at zero

  double fan_in = 1.0;
  if (is_lstm) {
    fan_in = static_cast<double>(hidden_of());
  } else if (decl.shape.size() == 3) {
    fan_in = static_cast<double>(decl.shape[0] * decl.shape[1]);
  } else if (n.rfind("dense.", 0) == 0) {
    fan_in = static_cast<double>(h.lstm2_hidden + (n == "dense.w_force" ? h.force_feature_dim : 0));
  } else {
    fan_in = static_cast<double>(decl.shape[0]);
  }
  const double bound = 1.0 / std::sqrt(fan_in);
  Rng rng(derive_seed(seed, n));
  for (double& v : t.values) v = rng.uniform(-bound, bound);
  return t;
}

Model build_model(Scenario scenario, const ModelHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  Model m;
  m.scenario = scenario;
  m.hyper = hyper;
  m.seed = seed;
  for (const auto& decl : declare_parameters(scenario, hyper)) {
    m.params.push_back({decl.name, decl.group, init_parameter(decl, hyper, seed)});
  }
  const auto count = count_parameters(m);
  if (count.total >= kParameterBudget) {
    throw ConfigError("model has " + std::to_string(count.total) + " parameters; budget is " +
                          std::to_string(kParameterBudget),
                      "hyper");
  }
  return m;
}

ParameterCount count_parameters(const Model& model) {
  ParameterCount c;
  for (const auto& p : model.params) {
    const std::size_t n = p.tensor.size();
    c.by_group[static_cast<std::size_t>(p.group)] += n;
    c.total += n;
    if (model.settings(p.group).trainable) c.trainable += n;
  }
  return c;
}

void set_group_training(Model& model, Group group, bool trainable, double lr_scale) {
  if (!(lr_scale >= 0.0) || !std::isfinite(lr_scale)) {
    throw ConfigError("lr_scale must be a finite non-negative number", "group");
  }
  model.settings(group) = {trainable, lr_scale};
}

void set_group_training(Model& model, std::string_view group, bool trainable, double lr_scale) {
  set_group_training(model, parse_group(group), trainable, lr_scale);
}

namespace {

void check_inputs(const Model& model, const data::PreprocessedExample& ex) {
  const std::size_t len = model.hyper.input_length;
  auto fail = [&](const std::string& m) {
    throw ConfigError("example " + data::example_key(ex) + ": " + m, "scenario");
  };
  if (ex.inputs.emg.size() != kEmgChannels) fail("expected 4 EMG channels");
  for (const auto& ch : ex.inputs.emg) {
    if (ch.size() != len) fail("EMG length " + std::to_string(ch.size()) + " != " + std::to_string(len));
  }
  if (uses_kinematics(model.scenario) && ex.inputs.kinematic.size() != len) {
    fail("scenario " + std::string(to_string(model.scenario)) + " needs a kinematic channel of length " +
         std::to_string(len));
  }
  if (uses_forces(model.scenario)) {
    if (ex.inputs.forces.size() != kForceChannels) {
      fail("scenario " + std::string(to_string(model.scenario)) + " needs 2 force channels");
    }
    for (const auto& ch : ex.inputs.forces) {
      if (ch.size() != len) fail("force length mismatch");
    }
  } else if (!ex.inputs.forces.empty()) {
    fail("force channels supplied to non-force scenario " + std::string(to_string(model.scenario)));
  }
}

}  // namespace

Batch make_batch(const Model& model, std::span<const data::PreprocessedExample> examples,
                 std::span<const std::size_t> indices) {
  const std::size_t b = indices.size();
  const std::size_t len = model.hyper.input_length;
  Batch batch;
  batch.size = b;
  for (auto& t : batch.emg) t = ad::Tensor::zeros({b, len, 1});
  if (uses_kinematics(model.scenario)) batch.kinematic = ad::Tensor::zeros({b, len});
  if (uses_forces(model.scenario)) batch.forces = ad::Tensor::zeros({b, len, kForceChannels});
  batch.kinematic_stats.resize(b);
  for (std::size_t r = 0; r < b; ++r) {
    const auto& ex = examples[indices[r]];
    check_inputs(model, ex);
    for (std::size_t c = 0; c < kEmgChannels; ++c) {
      std::copy(ex.inputs.emg[c].begin(), ex.inputs.emg[c].end(), batch.emg[c].values.begin() + r * len);
    }
    if (uses_kinematics(model.scenario)) {
      std::copy(ex.inputs.kinematic.begin(), ex.inputs.kinematic.end(), batch.kinematic.values.begin() + r * len);
    }
    if (uses_forces(model.scenario)) {
      for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t c = 0; c < kForceChannels; ++c) {
          batch.forces.values[(r * len + t) * kForceChannels + c] = ex.inputs.forces[c][t];
        }
      }
    }
    batch.kinematic_stats[r] = ex.inputs.kinematic_stats;
  }
  return batch;
}

namespace {

using ad::Graph;
using ad::NodeId;

// (B, T, D) x (D, N) -> (B, T, N)
NodeId project_sequence(Graph& g, NodeId seq, NodeId weight) {
  const auto s = g.shape(seq);
  const std::size_t n = g.shape(weight)[1];
  const NodeId flat = g.reshape(seq, {s[0] * s[1], s[2]});
  return g.reshape(g.matmul(flat, weight), {s[0], s[1], n});
}

// Runs an LSTM over pre-projected inputs (B, T, 4H); returns every hidden state (B, H).
std::vector<NodeId> run_lstm(Graph& g, NodeId projected, NodeId wh, NodeId bias, std::size_t hidden) {
  const auto s = g.shape(projected);
  const std::size_t batch = s[0], steps = s[1];
  NodeId h = g.input(ad::Tensor::zeros({batch, hidden}));
  NodeId c = g.input(ad::Tensor::zeros({batch, hidden}));
  std::vector<NodeId> hs;
  hs.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const NodeId gx = g.reshape(g.slice(projected, 1, t, t + 1), {batch, 4 * hidden});
    const NodeId gates = g.add(g.add(gx, g.matmul(h, wh)), bias);
    const NodeId in_gate = g.sigmoid(g.slice(gates, 1, 0, hidden));
    const NodeId forget = g.sigmoid(g.slice(gates, 1, hidden, 2 * hidden));
    const NodeId cell = g.tanh(g.slice(gates, 1, 2 * hidden, 3 * hidden));
    const NodeId out_gate = g.sigmoid(g.slice(gates, 1, 3 * hidden, 4 * hidden));
    c = g.add(g.mul(forget, c), g.mul(in_gate, cell));
    h = g.mul(out_gate, g.tanh(c));
    hs.push_back(h);
  }
  return hs;
}

// Stacks per-step (B, D) nodes into (B, T, D).
NodeId stack_steps(Graph& g, const std::vector<NodeId>& steps) {
  std::vector<NodeId> parts;
  parts.reserve(steps.size());
  for (NodeId s : steps) {
    const auto& sh = g.shape(s);
    parts.push_back(g.reshape(s, {sh[0], 1, sh[1]}));
  }
  return g.concat(parts, 1);
}

// conv -> bias -> relu, twice: (B, L, Cin) -> (B, L/4, Cout2).
NodeId conv_stack(Graph& g, Model& m, NodeId x, const std::string& prefix) {
  const auto& h = m.hyper;
  NodeId y = g.conv1d(x, g.parameter(m.at(prefix + ".conv1.w").tensor), h.conv1.stride);
  y = g.relu(g.add(y, g.parameter(m.at(prefix + ".conv1.b").tensor)));
  y = g.conv1d(y, g.parameter(m.at(prefix + ".conv2.w").tensor), h.conv2.stride);
  return g.relu(g.add(y, g.parameter(m.at(prefix + ".conv2.b").tensor)));
}

}  // namespace

ForwardNodes build_forward(Graph& g, Model& m, const Batch& batch) {
  const auto& h = m.hyper;
  const std::size_t b = batch.size;
  const std::size_t steps = h.steps();
  const std::size_t f2 = h.conv2.filters;
  auto param = [&](const char* name) { return g.parameter(m.at(name).tensor); };

  // Per-channel convolutional features, each (B, T, F2).
  std::array<NodeId, kEmgChannels> features{};
  for (std::size_t c = 0; c < kEmgChannels; ++c) {
    features[c] = conv_stack(g, m, g.input(batch.emg[c]), std::string(kChannelPrefix[c]));
  }
  const NodeId emg_seq = g.concat(std::span<const NodeId>(features), 2);  // (B, T, 4*F2)
  NodeId lstm1_in = project_sequence(g, emg_seq, param("lstm1.wx_emg"));

  ForwardNodes out;
  if (uses_kinematics(m.scenario)) {
    // Knee history as T rows of 4 consecutive samples.
    const NodeId kin = g.reshape(g.input(batch.kinematic), {b, steps, 4});
    const auto kin_h = run_lstm(g, project_sequence(g, kin, param("kin.lstm.wx")), param("kin.lstm.wh"),
                                param("kin.lstm.b"), h.kin_lstm_hidden);
    const NodeId kin_seq = stack_steps(g, kin_h);  // (B, T, K)

    // Per-step scaled dot-product attention over the four channels.
    const NodeId query = g.add(project_sequence(g, kin_seq, param("attn.wq")), param("attn.bq"));
    const NodeId wk = param("attn.wk"), bk = param("attn.bk"), wv = param("attn.wv"), bv = param("attn.bv");
    const NodeId score_reduce =
        g.input(ad::Tensor::filled({h.attn_dim, 1}, 1.0 / std::sqrt(static_cast<double>(h.attn_dim))));
    std::array<NodeId, kEmgChannels> scores{}, values{};
    for (std::size_t c = 0; c < kEmgChannels; ++c) {
      const NodeId key = g.add(project_sequence(g, features[c], wk), bk);
      values[c] = g.add(project_sequence(g, features[c], wv), bv);
      const NodeId prod = g.reshape(g.mul(query, key), {b * steps, h.attn_dim});
      scores[c] = g.reshape(g.matmul(prod, score_reduce), {b, steps, 1});
    }
    const NodeId weights = g.softmax(g.concat(std::span<const NodeId>(scores), 2), 2);  // (B, T, 4)
    const NodeId expand = g.input(ad::Tensor::filled({1, h.attn_dim}, 1.0));
    NodeId context = 0;
    for (std::size_t c = 0; c < kEmgChannels; ++c) {
      const NodeId w = g.reshape(g.slice(weights, 2, c, c + 1), {b * steps, 1});
      const NodeId wide = g.reshape(g.matmul(w, expand), {b, steps, h.attn_dim});
      const NodeId part = g.mul(wide, values[c]);
      context = c == 0 ? part : g.add(context, part);
    }
    const NodeId fused = g.concat({kin_seq, context}, 2);  // (B, T, K + A)
    lstm1_in = g.add(lstm1_in, project_sequence(g, fused, param("lstm1.wx_fused")));
    out.attention = weights;
    out.has_attention = true;
  }
  (void)f2;

  const auto h1 = run_lstm(g, lstm1_in, param("lstm1.wh"), param("lstm1.b"), h.lstm1_hidden);
  const NodeId lstm2_in = project_sequence(g, stack_steps(g, h1), param("lstm2.wx"));
  const auto h2 = run_lstm(g, lstm2_in, param("lstm2.wh"), param("lstm2.b"), h.lstm2_hidden);

  NodeId y = g.matmul(h2.back(), param("dense.w_hidden"));
  if (uses_forces(m.scenario)) {
    const NodeId force_feat = g.mean(conv_stack(g, m, g.input(batch.forces), "force"), 1);  // (B, Ff)
    y = g.add(y, g.matmul(force_feat, param("dense.w_force")));
  }
  out.output = g.add(y, param("dense.b"));
  return out;
}

namespace {

struct Frame {
  double offset;
  double scale;
};

Frame frame_for(const Model& model, const data::PreprocessedExample& ex) {
  if (model.frame() == TargetFrame::last_observed) {
    return {ex.last_observed_deg, std::max(ex.inputs.kinematic_stats.std, kWindowScaleFloorDeg)};
  }
  return {model.target_stats.mean, model.target_stats.std};
}

}  // namespace

ad::Tensor normalized_targets(const Model& model, std::span<const data::PreprocessedExample> examples,
                              std::span<const std::size_t> indices) {
  const auto horizon = static_cast<std::size_t>(model.hyper.horizon);
  ad::Tensor t = ad::Tensor::zeros({indices.size(), horizon});
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto& ex = examples[indices[r]];
    if (ex.target.size() != horizon) {
      throw ConfigError("example " + data::example_key(ex) + " has horizon " + std::to_string(ex.target.size()) +
                            ", model predicts " + std::to_string(horizon),
                        "horizon");
    }
    const Frame f = frame_for(model, ex);
    for (std::size_t j = 0; j < horizon; ++j) t.values[r * horizon + j] = (ex.target[j] - f.offset) / f.scale;
  }
  return t;
}

double to_degrees(const Model& model, const data::PreprocessedExample& example, double normalized) {
  const Frame f = frame_for(model, example);
  return normalized * f.scale + f.offset;
}

Prediction forward(const Model& model, std::span<const data::PreprocessedExample> examples) {
  constexpr std::size_t kChunk = 64;
  Prediction p;
  p.batch = examples.size();
  p.horizon = static_cast<std::size_t>(model.hyper.horizon);
  p.steps = model.hyper.steps();
  p.degrees.resize(p.batch * p.horizon);
  const bool attn = uses_kinematics(model.scenario);
  if (attn) p.attention.resize(p.batch * p.steps * kEmgChannels);
  // Graphs only read bound parameter storage during a forward pass.
  Model& shared = const_cast<Model&>(model);
  for (std::size_t start = 0; start < p.batch; start += kChunk) {
    const std::size_t n = std::min(kChunk, p.batch - start);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), start);
    const Batch batch = make_batch(model, examples, idx);
    ad::Graph g;
    const auto nodes = build_forward(g, shared, batch);
    const auto out = g.value(nodes.output);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < p.horizon; ++j) {
        p.degrees[(start + r) * p.horizon + j] = to_degrees(model, examples[start + r], out[r * p.horizon + j]);
      }
    }
    if (attn) {
      const auto w = g.value(nodes.attention);
      std::copy(w.begin(), w.end(), p.attention.begin() + static_cast<std::ptrdiff_t>(start * p.steps * kEmgChannels));
    }
  }
  return p;
}

}  // namespace kneecast::model
