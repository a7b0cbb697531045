//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_AUTODIFF_H_
#define CLIFFKIT_AUTODIFF_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "cliffkit/tensor.h"

namespace cliffkit::ad {

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
  std::size_t id = 0;
  Tape *tape = nullptr;

  const Tensor &value() const;
};

/// Reverse-mode tape. Values are recorded in evaluation order, so the record
/// is already topologically sorted; backward() walks it once in reverse.
/// A tape has a single writer; use one tape per thread.
class Tape {
public:
  using Backward = std::function<void(Tape &, const Tensor &out_grad)>;

  Var constant(Tensor value);
  // Leaf whose gradient is retained by backward().
  Var input(Tensor value);

  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Tensor value, std::span<const Var> inputs, Backward backward);

  const Tensor &value(Var v) const;
  bool requires_gradient(Var v) const;

  // Gradient accumulator for v, or nullptr when v does not need one.
  Tensor *gradient_slot(Var v);

  /// Seeds d(output)/d(output) = 1 and propagates adjoints. The output must
  /// be a one-element tensor recorded on this tape.
  void backward(Var output);

  // Gradient of the last backward() output with respect to v; zeros when no
  // path connects them.
  const Tensor &gradient(Var v) const;

  std::size_t size() const { return nodes_.size(); }

private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    Backward backward;
  };

  void check(Var v) const;

  std::vector<Node> nodes_;
  mutable Tensor zero_;
};

enum class GroupTag { CommonHead, UncommonHead, Other };

std::string group_tag_name(GroupTag tag);
GroupTag parse_group_tag(const std::string &name);

struct Parameter {
  std::string name;
  GroupTag group = GroupTag::Other;
  Tensor value;
};

// ---- primitives -----------------------------------------------------------

Var matmul(Var a, Var b);
// Same shapes, or b a single row broadcast over the rows of a.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var relu(Var a);
// axis 0 averages rows into one row; axis 1 averages columns into one column.
Var mean(Var a, int axis);
Var sum(Var a);
Var concat(std::span<const Var> parts, int axis);
Var concat(std::initializer_list<Var> parts, int axis);
Var gather_rows(Var a, std::span<const std::size_t> index);
// Row e of the result is the mean of all rows of `a` whose index equals e;
// rows with no contributions stay zero.
Var scatter_mean(Var a, std::span<const std::size_t> index, std::size_t rows);
// Row e: reshape(w[e], out x in) times x[e], where in = x.cols().
Var edge_matvec(Var w, Var x);
// Mean of the selected rows as a single row; an empty selection yields zeros.
Var masked_mean(Var a, const std::vector<bool> &mask);

struct BatchStats {
  Tensor mean;
  Tensor var;
};

struct RunningStats {
  Tensor mean;
  Tensor var;
  bool initialized = false;
};

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

// Normalizes each column with the batch mean and biased variance.
Var batchnorm_train(Var x, Var gamma, Var beta, BatchStats *stats = nullptr,
                    double eps = kBatchNormEpsilon);
// Uses frozen running statistics; throws std::logic_error if uninitialized.
Var batchnorm_eval(Var x, Var gamma, Var beta, const RunningStats &running,
                   double eps = kBatchNormEpsilon);
void update_running_stats(RunningStats &running, const BatchStats &batch,
                          double momentum = kBatchNormMomentum);

} // namespace cliffkit::ad

#endif // CLIFFKIT_AUTODIFF_H_
