//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_TENSOR_H_
#define CLIFFKIT_TENSOR_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cliffkit::ad {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape &shape);

class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major block of doubles. Rank 0 is a scalar, rank 1 behaves as a
/// single row, rank 2 is a matrix; nothing in the engine needs more.
class Tensor {
public:
  Tensor() : Tensor(Shape{}, 0.0) {}
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor(Shape{}, v); }
  static Tensor zeros_like(const Tensor &t) { return Tensor(t.shape_, 0.0); }

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double *data() { return values_.data(); }
  const double *data() const { return values_.data(); }

  double &operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double &at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

  // Value of a one-element tensor.
  double item() const;

  bool all_finite() const;

  bool operator==(const Tensor &other) const = default;

private:
  Shape shape_;
  std::vector<double> values_;
};

} // namespace cliffkit::ad

#endif // CLIFFKIT_TENSOR_H_
