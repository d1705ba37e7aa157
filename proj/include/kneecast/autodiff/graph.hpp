#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "kneecast/autodiff/tensor.hpp"

namespace kneecast::ad {

using NodeId = std::size_t;

enum class Op {
  input,
  parameter,
  add,
  mul,
  matmul,
  conv1d,
  sigmoid,
  tanh,
  relu,
  softmax,
  concat,
  slice,
  reshape,
  mean,
  mse,
};

std::string_view to_string(Op op);

/// Reverse-mode tape. Nodes are appended in creation order, so the node list
/// is always a topological order. Every op is evaluated eagerly when it is
/// added; forward() replays the whole tape after inputs or parameters change.
///
/// Broadcasting: add/mul accept a right operand whose shape equals the left
/// shape or a suffix of it (e.g. a bias vector). conv1d is cross-correlation
/// over channels-last data, x (B, L, Cin) with kernel (K, Cin, Cout), zero
/// "same" padding and output length ceil(L / stride).
class Graph {
 public:
  NodeId input(Tensor value);
  /// Leaf bound to external storage; binding the same tensor twice returns
  /// the existing node. The tensor must outlive the graph.
  NodeId parameter(Tensor& param);

  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId matmul(NodeId a, NodeId b);
  NodeId conv1d(NodeId x, NodeId kernel, std::size_t stride);
  NodeId sigmoid(NodeId x);
  NodeId tanh(NodeId x);
  NodeId relu(NodeId x);
  NodeId softmax(NodeId x, int axis = -1);
  NodeId concat(std::span<const NodeId> parts, int axis);
  NodeId concat(std::initializer_list<NodeId> parts, int axis) {
    return concat(std::span<const NodeId>(parts.begin(), parts.size()), axis);
  }
  NodeId slice(NodeId x, int axis, std::size_t begin, std::size_t end);
  NodeId reshape(NodeId x, Shape shape);
  /// Mean of all elements (scalar result).
  NodeId mean(NodeId x);
  /// Mean along one axis; the axis is removed from the shape.
  NodeId mean(NodeId x, int axis);
  NodeId mse(NodeId prediction, NodeId target);

  void set_input(NodeId id, const Tensor& value);
  /// Re-evaluates every node in order.
  void forward();
  /// Seeds d(loss)/d(loss) = 1 and propagates to every reachable node.
  /// Previous gradients are discarded.
  void backward(NodeId loss);

  std::size_t size() const { return nodes_.size(); }
  Op op(NodeId id) const { return nodes_[id].op; }
  const std::vector<NodeId>& inputs(NodeId id) const { return nodes_[id].inputs; }
  const Shape& shape(NodeId id) const { return nodes_[id].shape; }
  std::span<const double> value(NodeId id) const { return nodes_[id].value; }
  double scalar(NodeId id) const { return nodes_[id].value.at(0); }
  /// Gradient of the last backward() loss w.r.t. the node; empty when unreachable.
  std::span<const double> grad(NodeId id) const { return nodes_[id].grad; }
  Tensor tensor(NodeId id) const;

  std::vector<NodeId> parameter_nodes() const;
  Tensor* bound_tensor(NodeId id) const { return nodes_[id].param; }

 private:
  struct Node {
    Op op = Op::input;
    std::vector<NodeId> inputs;
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    Tensor* param = nullptr;
    int axis = 0;
    std::size_t begin = 0, end = 0, stride = 1, pad = 0;
  };

  NodeId push(Node node);
  void compute(Node& node);
  void propagate(Node& node);
  [[noreturn]] void shape_error(Op op, const std::string& detail) const;
  void check_id(NodeId id) const;

  std::vector<Node> nodes_;
};

/// Feeds `inputs`, replays the tape and returns copies of `outputs`.
std::vector<Tensor> evaluate(Graph& graph, std::span<const std::pair<NodeId, Tensor>> inputs,
                             std::span<const NodeId> outputs);

/// Runs graph.backward(loss) and writes every bound parameter's gradient into
/// its Tensor::grad (zeros for parameters the loss does not reach). Throws
/// ConfigError("contract") for a non-scalar loss.
void backward(Graph& graph, NodeId loss);

}  // namespace kneecast::ad
