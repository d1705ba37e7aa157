#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kneecast::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

/// Dense row-major float64 tensor. `grad` is empty until a gradient is
/// written, after which it matches `values` in length.
struct Tensor {
  Shape shape;
  std::vector<double> values;
  bool requires_grad = false;
  std::vector<double> grad;

  Tensor() = default;
  Tensor(Shape s, std::vector<double> v, bool trainable = false);

  static Tensor zeros(Shape s, bool trainable = false);
  static Tensor filled(Shape s, double value);

  std::size_t size() const { return values.size(); }
  bool has_grad() const { return !grad.empty(); }
  void zero_grad() { grad.assign(values.size(), 0.0); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

}  // namespace kneecast::ad
