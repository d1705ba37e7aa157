#include "kneecast/autodiff/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kneecast/error.hpp"

namespace kneecast::ad {

std::string_view to_string(Op op) {
  switch (op) {
    case Op::input: return "input";
    case Op::parameter: return "parameter";
    case Op::add: return "add";
    case Op::mul: return "mul";
    case Op::matmul: return "matmul";
    case Op::conv1d: return "conv1d";
    case Op::sigmoid: return "sigmoid";
    case Op::tanh: return "tanh";
    case Op::relu: return "relu";
    case Op::softmax: return "softmax";
    case Op::concat: return "concat";
    case Op::slice: return "slice";
    case Op::reshape: return "reshape";
    case Op::mean: return "mean";
    case Op::mse: return "mse";
  }
  return "?";
}

namespace {

// Splits a shape around `axis` into (outer, axis length, inner).
struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.len = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void Graph::check_id(NodeId id) const {
  if (id >= nodes_.size()) {
    throw ConfigError("node id " + std::to_string(id) + " does not exist", "graph");
  }
}

void Graph::shape_error(Op op, const std::string& detail) const {
  std::ostringstream m;
  m << "node #" << nodes_.size() << " (" << to_string(op) << "): " << detail;
  throw DataError(m.str(), "shape");
}

NodeId Graph::push(Node node) {
  for (NodeId in : node.inputs) check_id(in);
  nodes_.push_back(std::move(node));
  compute(nodes_.back());
  return nodes_.size() - 1;
}

NodeId Graph::input(Tensor value) {
  Node n;
  n.op = Op::input;
  n.shape = std::move(value.shape);
  n.value = std::move(value.values);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

NodeId Graph::parameter(Tensor& param) {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].param == &param) return i;
  }
  Node n;
  n.op = Op::parameter;
  n.shape = param.shape;
  n.param = &param;
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  if (!is_suffix(shape(b), shape(a))) {
    shape_error(Op::add, "cannot broadcast " + ad::to_string(shape(b)) + " onto " + ad::to_string(shape(a)));
  }
  Node n;
  n.op = Op::add;
  n.inputs = {a, b};
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  if (!is_suffix(shape(b), shape(a))) {
    shape_error(Op::mul, "cannot broadcast " + ad::to_string(shape(b)) + " onto " + ad::to_string(shape(a)));
  }
  Node n;
  n.op = Op::mul;
  n.inputs = {a, b};
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  const auto& sa = shape(a);
  const auto& sb = shape(b);
  if (sa.size() != 2 || sb.size() != 2 || sa[1] != sb[0]) {
    shape_error(Op::matmul, "incompatible operands " + ad::to_string(sa) + " x " + ad::to_string(sb));
  }
  Node n;
  n.op = Op::matmul;
  n.inputs = {a, b};
  n.shape = {sa[0], sb[1]};
  return push(std::move(n));
}

NodeId Graph::conv1d(NodeId x, NodeId kernel, std::size_t stride) {
  check_id(x);
  check_id(kernel);
  const auto& sx = shape(x);
  const auto& sk = shape(kernel);
  if (sx.size() != 3 || sk.size() != 3 || sx[2] != sk[1] || stride == 0 || sk[0] == 0) {
    shape_error(Op::conv1d, "input " + ad::to_string(sx) + " vs kernel " + ad::to_string(sk) +
                                " (expected (B, L, Cin) and (K, Cin, Cout), stride >= 1)");
  }
  const std::size_t len = sx[1];
  const std::size_t out_len = (len + stride - 1) / stride;
  const std::size_t k = sk[0];
  const std::size_t needed = (out_len == 0 ? 0 : (out_len - 1) * stride + k);
  Node n;
  n.op = Op::conv1d;
  n.inputs = {x, kernel};
  n.shape = {sx[0], out_len, sk[2]};
  n.stride = stride;
  n.pad = needed > len ? (needed - len) / 2 : 0;
  return push(std::move(n));
}

NodeId Graph::sigmoid(NodeId x) {
  check_id(x);
  Node n;
  n.op = Op::sigmoid;
  n.inputs = {x};
  n.shape = shape(x);
  return push(std::move(n));
}

NodeId Graph::tanh(NodeId x) {
  check_id(x);
  Node n;
  n.op = Op::tanh;
  n.inputs = {x};
  n.shape = shape(x);
  return push(std::move(n));
}

NodeId Graph::relu(NodeId x) {
  check_id(x);
  Node n;
  n.op = Op::relu;
  n.inputs = {x};
  n.shape = shape(x);
  return push(std::move(n));
}

namespace {

std::size_t normalize_axis(int axis, std::size_t rank, bool& ok) {
  const int r = static_cast<int>(rank);
  if (axis < 0) axis += r;
  ok = axis >= 0 && axis < r;
  return ok ? static_cast<std::size_t>(axis) : 0;
}

}  // namespace

NodeId Graph::softmax(NodeId x, int axis) {
  check_id(x);
  bool ok = false;
  const std::size_t ax = normalize_axis(axis, shape(x).size(), ok);
  if (!ok) shape_error(Op::softmax, "axis " + std::to_string(axis) + " out of range for " + ad::to_string(shape(x)));
  Node n;
  n.op = Op::softmax;
  n.inputs = {x};
  n.shape = shape(x);
  n.axis = static_cast<int>(ax);
  return push(std::move(n));
}

NodeId Graph::concat(std::span<const NodeId> parts, int axis) {
  if (parts.empty()) shape_error(Op::concat, "no inputs");
  for (NodeId p : parts) check_id(p);
  const Shape& first = shape(parts[0]);
  bool ok = false;
  const std::size_t ax = normalize_axis(axis, first.size(), ok);
  if (!ok) shape_error(Op::concat, "axis " + std::to_string(axis) + " out of range for " + ad::to_string(first));
  Shape out = first;
  out[ax] = 0;
  for (NodeId p : parts) {
    const Shape& s = shape(p);
    bool same = s.size() == first.size();
    for (std::size_t d = 0; same && d < s.size(); ++d) same = d == ax || s[d] == first[d];
    if (!same) shape_error(Op::concat, "cannot join " + ad::to_string(s) + " with " + ad::to_string(first));
    out[ax] += s[ax];
  }
  Node n;
  n.op = Op::concat;
  n.inputs.assign(parts.begin(), parts.end());
  n.shape = std::move(out);
  n.axis = static_cast<int>(ax);
  return push(std::move(n));
}

NodeId Graph::slice(NodeId x, int axis, std::size_t begin, std::size_t end) {
  check_id(x);
  bool ok = false;
  const std::size_t ax = normalize_axis(axis, shape(x).size(), ok);
  if (!ok || begin >= end || end > shape(x)[ax]) {
    shape_error(Op::slice, "range [" + std::to_string(begin) + ", " + std::to_string(end) + ") on axis " +
                               std::to_string(axis) + " of " + ad::to_string(shape(x)));
  }
  Node n;
  n.op = Op::slice;
  n.inputs = {x};
  n.shape = shape(x);
  n.shape[ax] = end - begin;
  n.axis = static_cast<int>(ax);
  n.begin = begin;
  n.end = end;
  return push(std::move(n));
}

NodeId Graph::reshape(NodeId x, Shape s) {
  check_id(x);
  if (numel(s) != numel(shape(x))) {
    shape_error(Op::reshape, "cannot view " + ad::to_string(shape(x)) + " as " + ad::to_string(s));
  }
  Node n;
  n.op = Op::reshape;
  n.inputs = {x};
  n.shape = std::move(s);
  return push(std::move(n));
}

NodeId Graph::mean(NodeId x) {
  check_id(x);
  if (numel(shape(x)) == 0) shape_error(Op::mean, "mean of an empty tensor");
  Node n;
  n.op = Op::mean;
  n.inputs = {x};
  n.shape = {};
  n.axis = -1;
  return push(std::move(n));
}

NodeId Graph::mean(NodeId x, int axis) {
  check_id(x);
  bool ok = false;
  const std::size_t ax = normalize_axis(axis, shape(x).size(), ok);
  if (!ok || shape(x)[ax] == 0) shape_error(Op::mean, "bad axis " + std::to_string(axis) + " for " + ad::to_string(shape(x)));
  Node n;
  n.op = Op::mean;
  n.inputs = {x};
  n.shape = shape(x);
  n.shape.erase(n.shape.begin() + static_cast<std::ptrdiff_t>(ax));
  n.axis = static_cast<int>(ax);
  return push(std::move(n));
}

NodeId Graph::mse(NodeId prediction, NodeId target) {
  check_id(prediction);
  check_id(target);
  if (shape(prediction) != shape(target) || numel(shape(prediction)) == 0) {
    shape_error(Op::mse, "prediction " + ad::to_string(shape(prediction)) + " vs target " +
                             ad::to_string(shape(target)));
  }
  Node n;
  n.op = Op::mse;
  n.inputs = {prediction, target};
  n.shape = {};
  return push(std::move(n));
}

void Graph::set_input(NodeId id, const Tensor& value) {
  check_id(id);
  Node& n = nodes_[id];
  if (n.op != Op::input) throw ConfigError("node #" + std::to_string(id) + " is not an input", "graph");
  if (value.shape != n.shape) {
    throw DataError("node #" + std::to_string(id) + " (input): expected " + ad::to_string(n.shape) + ", got " +
                        ad::to_string(value.shape),
                    "shape");
  }
  n.value = value.values;
}

void Graph::forward() {
  for (auto& n : nodes_) compute(n);
}

Tensor Graph::tensor(NodeId id) const {
  check_id(id);
  return Tensor(nodes_[id].shape, nodes_[id].value);
}

std::vector<NodeId> Graph::parameter_nodes() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op == Op::parameter) out.push_back(i);
  }
  return out;
}

void Graph::compute(Node& n) {
  auto in = [&](std::size_t k) -> const Node& { return nodes_[n.inputs[k]]; };
  const std::size_t count = numel(n.shape);
  switch (n.op) {
    case Op::input:
      return;
    case Op::parameter:
      n.value = n.param->values;
      return;
    case Op::add:
    case Op::mul: {
      const auto& a = in(0).value;
      const auto& b = in(1).value;
      n.value.resize(count);
      const std::size_t nb = b.size();
      double* out = n.value.data();
      if (n.op == Op::add) {
        for (std::size_t i = 0; i < count; i += nb)
          for (std::size_t j = 0; j < nb; ++j) out[i + j] = a[i + j] + b[j];
      } else {
        for (std::size_t i = 0; i < count; i += nb)
          for (std::size_t j = 0; j < nb; ++j) out[i + j] = a[i + j] * b[j];
      }
      return;
    }
    case Op::matmul: {
      const auto& a = in(0);
      const auto& b = in(1);
      const std::size_t m = a.shape[0], k = a.shape[1], cols = b.shape[1];
      n.value.assign(count, 0.0);
      const double* A = a.value.data();
      const double* B = b.value.data();
      double* C = n.value.data();
      for (std::size_t i = 0; i < m; ++i) {
        double* crow = C + i * cols;
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A[i * k + p];
          if (av == 0.0) continue;
          const double* brow = B + p * cols;
          for (std::size_t j = 0; j < cols; ++j) crow[j] += av * brow[j];
        }
      }
      return;
    }
    case Op::conv1d: {
      const auto& x = in(0);
      const auto& w = in(1);
      const std::size_t batch = x.shape[0], len = x.shape[1], cin = x.shape[2];
      const std::size_t kw = w.shape[0], cout = w.shape[2];
      const std::size_t out_len = n.shape[1];
      n.value.assign(count, 0.0);
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t t = 0; t < out_len; ++t) {
          double* o = n.value.data() + (b * out_len + t) * cout;
          for (std::size_t q = 0; q < kw; ++q) {
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t * n.stride + q) - static_cast<std::ptrdiff_t>(n.pad);
            if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
            const double* xr = x.value.data() + (b * len + static_cast<std::size_t>(src)) * cin;
            const double* wr = w.value.data() + q * cin * cout;
            for (std::size_t ci = 0; ci < cin; ++ci) {
              const double xv = xr[ci];
              const double* wc = wr + ci * cout;
              for (std::size_t co = 0; co < cout; ++co) o[co] += xv * wc[co];
            }
          }
        }
      }
      return;
    }
    case Op::sigmoid: {
      const auto& a = in(0).value;
      n.value.resize(count);
      for (std::size_t i = 0; i < count; ++i) n.value[i] = stable_sigmoid(a[i]);
      return;
    }
    case Op::tanh: {
      const auto& a = in(0).value;
      n.value.resize(count);
      for (std::size_t i = 0; i < count; ++i) n.value[i] = std::tanh(a[i]);
      return;
    }
    case Op::relu: {
      const auto& a = in(0).value;
      n.value.resize(count);
      for (std::size_t i = 0; i < count; ++i) n.value[i] = a[i] > 0.0 ? a[i] : 0.0;
      return;
    }
    case Op::softmax: {
      const auto& a = in(0).value;
      const auto s = split_axis(n.shape, static_cast<std::size_t>(n.axis));
      n.value.resize(count);
      for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t i = 0; i < s.inner; ++i) {
          const std::size_t base = o * s.len * s.inner + i;
          double mx = a[base];
          for (std::size_t j = 1; j < s.len; ++j) mx = std::max(mx, a[base + j * s.inner]);
          double sum = 0.0;
          for (std::size_t j = 0; j < s.len; ++j) {
            const double e = std::exp(a[base + j * s.inner] - mx);
            n.value[base + j * s.inner] = e;
            sum += e;
          }
          for (std::size_t j = 0; j < s.len; ++j) n.value[base + j * s.inner] /= sum;
        }
      }
      return;
    }
    case Op::concat: {
      const auto s = split_axis(n.shape, static_cast<std::size_t>(n.axis));
      n.value.resize(count);
      std::size_t offset = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const auto& p = in(k);
        const std::size_t plen = p.shape[static_cast<std::size_t>(n.axis)];
        const std::size_t chunk = plen * s.inner;
        for (std::size_t o = 0; o < s.outer; ++o) {
          std::copy_n(p.value.data() + o * chunk, chunk, n.value.data() + o * s.len * s.inner + offset * s.inner);
        }
        offset += plen;
      }
      return;
    }
    case Op::slice: {
      const auto& src = in(0);
      const auto s = split_axis(src.shape, static_cast<std::size_t>(n.axis));
      const std::size_t chunk = (n.end - n.begin) * s.inner;
      n.value.resize(count);
      for (std::size_t o = 0; o < s.outer; ++o) {
        std::copy_n(src.value.data() + o * s.len * s.inner + n.begin * s.inner, chunk, n.value.data() + o * chunk);
      }
      return;
    }
    case Op::reshape:
      n.value = in(0).value;
      return;
    case Op::mean: {
      const auto& src = in(0);
      if (n.axis < 0) {
        double sum = 0.0;
        for (double v : src.value) sum += v;
        n.value.assign(1, sum / static_cast<double>(src.value.size()));
        return;
      }
      const auto s = split_axis(src.shape, static_cast<std::size_t>(n.axis));
      n.value.assign(count, 0.0);
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t j = 0; j < s.len; ++j)
          for (std::size_t i = 0; i < s.inner; ++i)
            n.value[o * s.inner + i] += src.value[(o * s.len + j) * s.inner + i];
      const double inv = 1.0 / static_cast<double>(s.len);
      for (double& v : n.value) v *= inv;
      return;
    }
    case Op::mse: {
      const auto& p = in(0).value;
      const auto& t = in(1).value;
      double sum = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double e = p[i] - t[i];
        sum += e * e;
      }
      n.value.assign(1, sum / static_cast<double>(p.size()));
      return;
    }
  }
}

void Graph::propagate(Node& n) {
  auto grad_of = [&](std::size_t k) -> std::vector<double>& {
    Node& src = nodes_[n.inputs[k]];
    if (src.grad.empty()) src.grad.assign(src.value.size(), 0.0);
    return src.grad;
  };
  const auto& g = n.grad;
  switch (n.op) {
    case Op::input:
    case Op::parameter:
      return;
    case Op::add: {
      auto& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      auto& gb = grad_of(1);
      const std::size_t nb = gb.size();
      for (std::size_t i = 0; i < g.size(); i += nb)
        for (std::size_t j = 0; j < nb; ++j) gb[j] += g[i + j];
      return;
    }
    case Op::mul: {
      const auto& a = nodes_[n.inputs[0]].value;
      const auto& b = nodes_[n.inputs[1]].value;
      const std::size_t nb = b.size();
      auto& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); i += nb)
        for (std::size_t j = 0; j < nb; ++j) ga[i + j] += g[i + j] * b[j];
      auto& gb = grad_of(1);
      for (std::size_t i = 0; i < g.size(); i += nb)
        for (std::size_t j = 0; j < nb; ++j) gb[j] += g[i + j] * a[i + j];
      return;
    }
    case Op::matmul: {
      const Node& a = nodes_[n.inputs[0]];
      const Node& b = nodes_[n.inputs[1]];
      const std::size_t m = a.shape[0], k = a.shape[1], cols = b.shape[1];
      const double* A = a.value.data();
      const double* B = b.value.data();
      const double* G = g.data();
      {
        double* GA = grad_of(0).data();
        for (std::size_t i = 0; i < m; ++i) {
          const double* grow = G + i * cols;
          for (std::size_t p = 0; p < k; ++p) {
            const double* brow = B + p * cols;
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += grow[j] * brow[j];
            GA[i * k + p] += s;
          }
        }
      }
      {
        double* GB = grad_of(1).data();
        for (std::size_t i = 0; i < m; ++i) {
          const double* grow = G + i * cols;
          for (std::size_t p = 0; p < k; ++p) {
            const double av = A[i * k + p];
            if (av == 0.0) continue;
            double* gbrow = GB + p * cols;
            for (std::size_t j = 0; j < cols; ++j) gbrow[j] += av * grow[j];
          }
        }
      }
      return;
    }
    case Op::conv1d: {
      const Node& x = nodes_[n.inputs[0]];
      const Node& w = nodes_[n.inputs[1]];
      const std::size_t batch = x.shape[0], len = x.shape[1], cin = x.shape[2];
      const std::size_t kw = w.shape[0], cout = w.shape[2];
      const std::size_t out_len = n.shape[1];
      double* gx = grad_of(0).data();
      double* gw = grad_of(1).data();
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t t = 0; t < out_len; ++t) {
          const double* go = g.data() + (b * out_len + t) * cout;
          for (std::size_t q = 0; q < kw; ++q) {
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t * n.stride + q) - static_cast<std::ptrdiff_t>(n.pad);
            if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
            const std::size_t xoff = (b * len + static_cast<std::size_t>(src)) * cin;
            const double* xr = x.value.data() + xoff;
            double* gxr = gx + xoff;
            const double* wr = w.value.data() + q * cin * cout;
            double* gwr = gw + q * cin * cout;
            for (std::size_t ci = 0; ci < cin; ++ci) {
              const double xv = xr[ci];
              const double* wc = wr + ci * cout;
              double* gwc = gwr + ci * cout;
              double acc = 0.0;
              for (std::size_t co = 0; co < cout; ++co) {
                acc += go[co] * wc[co];
                gwc[co] += xv * go[co];
              }
              gxr[ci] += acc;
            }
          }
        }
      }
      return;
    }
    case Op::sigmoid: {
      auto& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.value[i] * (1.0 - n.value[i]);
      return;
    }
    case Op::tanh: {
      auto& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
      return;
    }
    case Op::relu: {
      const auto& a = nodes_[n.inputs[0]].value;
      auto& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (a[i] > 0.0) ga[i] += g[i];
      }
      return;
    }
    case Op::softmax: {
      auto& ga = grad_of(0);
      const auto s = split_axis(n.shape, static_cast<std::size_t>(n.axis));
      for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t i = 0; i < s.inner; ++i) {
          const std::size_t base = o * s.len * s.inner + i;
          double dot = 0.0;
          for (std::size_t j = 0; j < s.len; ++j) dot += g[base + j * s.inner] * n.value[base + j * s.inner];
          for (std::size_t j = 0; j < s.len; ++j) {
            const std::size_t idx = base + j * s.inner;
            ga[idx] += n.value[idx] * (g[idx] - dot);
          }
        }
      }
      return;
    }
    case Op::concat: {
      const auto s = split_axis(n.shape, static_cast<std::size_t>(n.axis));
      std::size_t offset = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        auto& gp = grad_of(k);
        const std::size_t plen = nodes_[n.inputs[k]].shape[static_cast<std::size_t>(n.axis)];
        const std::size_t chunk = plen * s.inner;
        for (std::size_t o = 0; o < s.outer; ++o) {
          const double* src = g.data() + o * s.len * s.inner + offset * s.inner;
          double* dst = gp.data() + o * chunk;
          for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
        }
        offset += plen;
      }
      return;
    }
    case Op::slice: {
      auto& gs = grad_of(0);
      const auto s = split_axis(nodes_[n.inputs[0]].shape, static_cast<std::size_t>(n.axis));
      const std::size_t chunk = (n.end - n.begin) * s.inner;
      for (std::size_t o = 0; o < s.outer; ++o) {
        double* dst = gs.data() + o * s.len * s.inner + n.begin * s.inner;
        const double* src = g.data() + o * chunk;
        for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
      }
      return;
    }
    case Op::reshape: {
      auto& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      return;
    }
    case Op::mean: {
      auto& ga = grad_of(0);
      if (n.axis < 0) {
        const double share = g[0] / static_cast<double>(ga.size());
        for (double& v : ga) v += share;
        return;
      }
      const auto s = split_axis(nodes_[n.inputs[0]].shape, static_cast<std::size_t>(n.axis));
      const double inv = 1.0 / static_cast<double>(s.len);
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t j = 0; j < s.len; ++j)
          for (std::size_t i = 0; i < s.inner; ++i) ga[(o * s.len + j) * s.inner + i] += g[o * s.inner + i] * inv;
      return;
    }
    case Op::mse: {
      const auto& p = nodes_[n.inputs[0]].value;
      const auto& t = nodes_[n.inputs[1]].value;
      const double scale = 2.0 * g[0] / static_cast<double>(p.size());
      auto& gp = grad_of(0);
      for (std::size_t i = 0; i < p.size(); ++i) gp[i] += scale * (p[i] - t[i]);
      auto& gt = grad_of(1);
      for (std::size_t i = 0; i < p.size(); ++i) gt[i] -= scale * (p[i] - t[i]);
      return;
    }
  }
}

void Graph::backward(NodeId loss) {
  check_id(loss);
  if (nodes_[loss].value.size() != 1) {
    throw ConfigError("backward: loss node #" + std::to_string(loss) + " has shape " +
                          ad::to_string(nodes_[loss].shape) + ", expected a scalar",
                      "contract");
  }
  for (auto& n : nodes_) n.grad.clear();
  nodes_[loss].grad.assign(1, 1.0);
  for (NodeId i = loss + 1; i-- > 0;) {
    if (!nodes_[i].grad.empty()) propagate(nodes_[i]);
  }
}

std::vector<Tensor> evaluate(Graph& graph, std::span<const std::pair<NodeId, Tensor>> inputs,
                             std::span<const NodeId> outputs) {
  for (const auto& [id, value] : inputs) graph.set_input(id, value);
  graph.forward();
  std::vector<Tensor> out;
  out.reserve(outputs.size());
  for (NodeId id : outputs) out.push_back(graph.tensor(id));
  return out;
}

void backward(Graph& graph, NodeId loss) {
  graph.backward(loss);
  for (NodeId id : graph.parameter_nodes()) {
    Tensor* t = graph.bound_tensor(id);
    const auto g = graph.grad(id);
    if (g.empty()) {
      t->grad.assign(t->values.size(), 0.0);
    } else {
      t->grad.assign(g.begin(), g.end());
    }
  }
}

}  // namespace kneecast::ad
