//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/tensor.h"

#include <cmath>
#include <functional>
#include <numeric>

namespace cliffkit::ad {

std::string shape_string(const Shape &shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0)
      s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

namespace {
std::size_t element_count(const Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}
} // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(element_count(shape_), fill) {
  if (shape_.size() > 2)
    throw ShapeError("tensors of rank > 2 are not supported");
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (shape_.size() > 2)
    throw ShapeError("tensors of rank > 2 are not supported");
  if (values_.size() != element_count(shape_))
    throw ShapeError("value count " + std::to_string(values_.size()) +
                     " does not match shape " + shape_string(shape_));
}

std::size_t Tensor::rows() const { return shape_.size() == 2 ? shape_[0] : 1; }

std::size_t Tensor::cols() const {
  if (shape_.size() == 2)
    return shape_[1];
  if (shape_.size() == 1)
    return shape_[0];
  return 1;
}

double Tensor::item() const {
  if (values_.size() != 1)
    throw ShapeError("item() on tensor of shape " + shape_string(shape_));
  return values_[0];
}

bool Tensor::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v))
      return false;
  return true;
}

} // namespace cliffkit::ad
