#include "kneecast/autodiff/tensor.hpp"

#include <sstream>

#include "kneecast/error.hpp"

namespace kneecast::ad {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream s;
  s << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) s << (i ? ", " : "") << shape[i];
  s << ')';
  return s.str();
}

Tensor::Tensor(Shape s, std::vector<double> v, bool trainable)
    : shape(std::move(s)), values(std::move(v)), requires_grad(trainable) {
  if (values.size() != numel(shape)) {
    throw DataError("tensor of shape " + to_string(shape) + " given " + std::to_string(values.size()) + " values",
                    "shape");
  }
}

Tensor Tensor::zeros(Shape s, bool trainable) {
  const std::size_t n = numel(s);
  return Tensor(std::move(s), std::vector<double>(n, 0.0), trainable);
}

Tensor Tensor::filled(Shape s, double value) {
  const std::size_t n = numel(s);
  return Tensor(std::move(s), std::vector<double>(n, value));
}

}  // namespace kneecast::ad
