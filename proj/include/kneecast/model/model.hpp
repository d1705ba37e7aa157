#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kneecast/autodiff/graph.hpp"
#include "kneecast/data/examples.hpp"
#include "kneecast/scenario.hpp"
#include "kneecast/signal/preprocess.hpp"

namespace kneecast::model {

enum class Group { emg_branch, kinematic_branch, force_branch, head };
inline constexpr std::array<Group, 4> kGroups{Group::emg_branch, Group::kinematic_branch, Group::force_branch,
                                              Group::head};

std::string_view to_string(Group g);
Group parse_group(std::string_view name);

struct ConvSpec {
  std::size_t filters = 8;
  std::size_t kernel = 9;
  std::size_t stride = 2;
};

struct ModelHyper {
  ConvSpec conv1{8, 9, 2};
  ConvSpec conv2{16, 5, 2};
  std::size_t emg_feature_dim = 16;  // must equal conv2.filters
  std::size_t lstm1_hidden = 64;
  std::size_t lstm2_hidden = 48;
  std::size_t kin_lstm_hidden = 32;
  std::size_t attn_dim = 16;
  std::size_t force_feature_dim = 16;
  int horizon = 1;
  std::size_t input_length = 200;  // samples per channel at the output rate

  void validate() const;
  /// Feature steps after both convolutions (input_length / 4).
  std::size_t steps() const { return input_length / (conv1.stride * conv2.stride); }
};

inline constexpr std::size_t kEmgChannels = 4;
inline constexpr std::size_t kForceChannels = 2;
inline constexpr std::size_t kParameterBudget = 100000;

struct Parameter {
  std::string name;
  Group group = Group::head;
  ad::Tensor tensor;
};

struct GroupSettings {
  bool trainable = true;
  double lr_scale = 1.0;
};

/// Training-target normalization in degrees. SIC scenarios use statistics of
/// the training set; scenarios with knee-angle input express targets as the
/// change from the last observed angle, scaled by the window's deviation.
struct TargetStats {
  double mean = 0.0;
  double std = 1.0;
  bool fitted = false;
};

enum class TargetFrame { dataset, last_observed };

/// Lower bound (degrees) on the window deviation used as target scale.
inline constexpr double kWindowScaleFloorDeg = 1.0;

class Model {
 public:
  Scenario scenario = Scenario::SIC;
  ModelHyper hyper;
  std::uint64_t seed = 0;
  std::vector<Parameter> params;
  std::array<GroupSettings, 4> groups{};
  TargetStats target_stats;
  signal::PreprocessConfig preprocess;
  std::vector<std::string> provenance;

  TargetFrame frame() const {
    return uses_kinematics(scenario) ? TargetFrame::last_observed : TargetFrame::dataset;
  }

  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;

  GroupSettings& settings(Group g) { return groups[static_cast<std::size_t>(g)]; }
  const GroupSettings& settings(Group g) const { return groups[static_cast<std::size_t>(g)]; }
};

/// Declared (name, group, shape) of every tensor a scenario needs.
struct TensorDecl {
  std::string name;
  Group group;
  ad::Shape shape;
};
std::vector<TensorDecl> declare_parameters(Scenario scenario, const ModelHyper& hyper);

/// Seeded initialization of one declared tensor; independent of the order in
/// which tensors are created.
ad::Tensor init_parameter(const TensorDecl& decl, const ModelHyper& hyper, std::uint64_t seed);

Model build_model(Scenario scenario, const ModelHyper& hyper, std::uint64_t seed);

struct ParameterCount {
  std::array<std::size_t, 4> by_group{};
  std::size_t total = 0;
  std::size_t trainable = 0;

  std::size_t group(Group g) const { return by_group[static_cast<std::size_t>(g)]; }
};

ParameterCount count_parameters(const Model& model);

void set_group_training(Model& model, Group group, bool trainable, double lr_scale);
void set_group_training(Model& model, std::string_view group, bool trainable, double lr_scale);

/// Network inputs for a batch of examples, laid out for the graph.
struct Batch {
  std::size_t size = 0;
  std::array<ad::Tensor, kEmgChannels> emg;  // each (B, L, 1)
  ad::Tensor kinematic;                      // (B, L)
  ad::Tensor forces;                         // (B, L, 2)
  std::vector<signal::ChannelStats> kinematic_stats;
};

Batch make_batch(const Model& model, std::span<const data::PreprocessedExample> examples,
                 std::span<const std::size_t> indices);

struct ForwardNodes {
  ad::NodeId output = 0;     // (B, H) in the normalized target frame
  ad::NodeId attention = 0;  // (B, T, 4); valid only when has_attention
  bool has_attention = false;
};

/// Records the network on `graph`. Parameters are bound by reference.
ForwardNodes build_forward(ad::Graph& graph, Model& model, const Batch& batch);

/// Normalized training targets (B, H) for `indices`.
ad::Tensor normalized_targets(const Model& model, std::span<const data::PreprocessedExample> examples,
                              std::span<const std::size_t> indices);

/// Maps a normalized prediction for one example back to degrees.
double to_degrees(const Model& model, const data::PreprocessedExample& example, double normalized);

struct Prediction {
  std::size_t batch = 0;
  std::size_t horizon = 0;
  std::size_t steps = 0;
  std::vector<double> degrees;    // batch x horizon
  std::vector<double> attention;  // batch x steps x 4, empty without attention

  double at(std::size_t b, std::size_t h) const { return degrees[b * horizon + h]; }
};

/// Inference in degrees. Throws ConfigError when example inputs do not match
/// the scenario (e.g. forces missing for a force scenario).
Prediction forward(const Model& model, std::span<const data::PreprocessedExample> examples);

}  // namespace kneecast::model
