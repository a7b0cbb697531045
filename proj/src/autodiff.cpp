//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/autodiff.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace cliffkit::ad {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

ConstMatrixMap view(const Tensor &t) {
  return ConstMatrixMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                        static_cast<Eigen::Index>(t.cols()));
}

MatrixMap view(Tensor &t) {
  return MatrixMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                   static_cast<Eigen::Index>(t.cols()));
}

Tape &tape_of(Var a) {
  if (a.tape == nullptr)
    throw std::logic_error("variable is not attached to a tape");
  return *a.tape;
}

Tape &tape_of(Var a, Var b) {
  if (a.tape != b.tape)
    throw std::logic_error("operands live on different tapes");
  return tape_of(a);
}

Shape matrix_shape(std::size_t rows, std::size_t cols) { return {rows, cols}; }

bool is_row(const Tensor &t) { return t.rank() <= 1 || t.rows() == 1; }

} // namespace

const Tensor &Var::value() const { return tape_of(*this).value(*this); }

std::string group_tag_name(GroupTag tag) {
  switch (tag) {
  case GroupTag::CommonHead: return "CN_head";
  case GroupTag::UncommonHead: return "UCN_head";
  case GroupTag::Other: return "other";
  }
  return "other";
}

GroupTag parse_group_tag(const std::string &name) {
  if (name == "CN_head")
    return GroupTag::CommonHead;
  if (name == "UCN_head")
    return GroupTag::UncommonHead;
  if (name == "other")
    return GroupTag::Other;
  throw std::invalid_argument("unknown parameter group '" + name + "'");
}

// ---- tape -----------------------------------------------------------------

void Tape::check(Var v) const {
  if (v.tape != this || v.id >= nodes_.size())
    throw std::logic_error("variable was not recorded on this tape");
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), false, false, nullptr});
  return Var{nodes_.size() - 1, this};
}

Var Tape::input(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), true, false, nullptr});
  return Var{nodes_.size() - 1, this};
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs,
                 Backward backward) {
  return record(std::move(value),
                std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Var Tape::record(Tensor value, std::span<const Var> inputs, Backward backward) {
#ifndef NDEBUG
  if (!value.all_finite()) {
    bool finite_inputs = true;
    for (Var in : inputs)
      finite_inputs = finite_inputs && this->value(in).all_finite();
    if (finite_inputs)
      throw std::domain_error("non-finite value produced from finite inputs");
  }
#endif
  bool needs = false;
  for (Var in : inputs) {
    check(in);
    needs = needs || nodes_[in.id].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), Tensor(), needs, false,
                        needs ? std::move(backward) : Backward{}});
  return Var{nodes_.size() - 1, this};
}

const Tensor &Tape::value(Var v) const {
  check(v);
  return nodes_[v.id].value;
}

bool Tape::requires_gradient(Var v) const {
  check(v);
  return nodes_[v.id].requires_grad;
}

Tensor *Tape::gradient_slot(Var v) {
  check(v);
  Node &n = nodes_[v.id];
  if (!n.requires_grad)
    return nullptr;
  if (!n.has_grad) {
    n.grad = Tensor::zeros_like(n.value);
    n.has_grad = true;
  }
  return &n.grad;
}

void Tape::backward(Var output) {
  check(output);
  if (nodes_[output.id].value.size() != 1)
    throw ShapeError("backward() needs a scalar output, got shape " +
                     shape_string(nodes_[output.id].value.shape()));
  for (Node &n : nodes_)
    n.has_grad = false;
  Tensor *seed = gradient_slot(output);
  if (seed == nullptr)
    return;
  (*seed)[0] = 1.0;
  for (std::size_t i = output.id + 1; i-- > 0;) {
    Node &n = nodes_[i];
    if (!n.has_grad || !n.backward)
      continue;
    // Callbacks only touch gradients of earlier nodes, so n.grad is stable.
    n.backward(*this, n.grad);
  }
}

const Tensor &Tape::gradient(Var v) const {
  check(v);
  const Node &n = nodes_[v.id];
  if (n.has_grad)
    return n.grad;
  zero_ = Tensor::zeros_like(n.value);
  return zero_;
}

// ---- primitives -----------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape &t = tape_of(a, b);
  const Tensor &A = t.value(a);
  const Tensor &B = t.value(b);
  if (A.cols() != B.rows() || A.rank() == 0 || B.rank() == 0)
    throw ShapeError("matmul shape mismatch " + shape_string(A.shape()) +
                     " x " + shape_string(B.shape()));
  Tensor out(matrix_shape(A.rows(), B.cols()));
  view(out).noalias() = view(A) * view(B);
  return t.record(std::move(out), {a, b},
                  [a, b](Tape &tape, const Tensor &g) {
                    if (Tensor *ga = tape.gradient_slot(a))
                      view(*ga).noalias() +=
                          view(g) * view(tape.value(b)).transpose();
                    if (Tensor *gb = tape.gradient_slot(b))
                      view(*gb).noalias() +=
                          view(tape.value(a)).transpose() * view(g);
                  });
}

Var add(Var a, Var b) {
  Tape &t = tape_of(a, b);
  const Tensor &A = t.value(a);
  const Tensor &B = t.value(b);
  if (A.shape() == B.shape()) {
    Tensor out = A;
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += B[i];
    return t.record(std::move(out), {a, b},
                    [a, b](Tape &tape, const Tensor &g) {
                      for (Var v : {a, b})
                        if (Tensor *gv = tape.gradient_slot(v))
                          for (std::size_t i = 0; i < g.size(); ++i)
                            (*gv)[i] += g[i];
                    });
  }
  if (is_row(B) && B.cols() == A.cols() && A.rank() >= 1) {
    Tensor out = A;
    const std::size_t cols = A.cols();
    for (std::size_t r = 0; r < A.rows(); ++r)
      for (std::size_t c = 0; c < cols; ++c)
        out[r * cols + c] += B[c];
    return t.record(std::move(out), {a, b},
                    [a, b, cols](Tape &tape, const Tensor &g) {
                      if (Tensor *ga = tape.gradient_slot(a))
                        for (std::size_t i = 0; i < g.size(); ++i)
                          (*ga)[i] += g[i];
                      if (Tensor *gb = tape.gradient_slot(b))
                        for (std::size_t i = 0; i < g.size(); ++i)
                          (*gb)[i % cols] += g[i];
                    });
  }
  throw ShapeError("add shape mismatch " + shape_string(A.shape()) + " + " +
                   shape_string(B.shape()));
}

Var sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

Var mul(Var a, Var b) {
  Tape &t = tape_of(a, b);
  const Tensor &A = t.value(a);
  const Tensor &B = t.value(b);
  if (A.shape() != B.shape())
    throw ShapeError("elementwise multiply shape mismatch " +
                     shape_string(A.shape()) + " * " + shape_string(B.shape()));
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] *= B[i];
  return t.record(std::move(out), {a, b}, [a, b](Tape &tape, const Tensor &g) {
    if (Tensor *ga = tape.gradient_slot(a)) {
      const Tensor &B = tape.value(b);
      for (std::size_t i = 0; i < g.size(); ++i)
        (*ga)[i] += g[i] * B[i];
    }
    if (Tensor *gb = tape.gradient_slot(b)) {
      const Tensor &A = tape.value(a);
      for (std::size_t i = 0; i < g.size(); ++i)
        (*gb)[i] += g[i] * A[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tape &t = tape_of(a);
  Tensor out = t.value(a);
  for (double &v : out.values())
    v *= factor;
  return t.record(std::move(out), {a}, [a, factor](Tape &tape, const Tensor &g) {
    if (Tensor *ga = tape.gradient_slot(a))
      for (std::size_t i = 0; i < g.size(); ++i)
        (*ga)[i] += factor * g[i];
  });
}

Var relu(Var a) {
  Tape &t = tape_of(a);
  Tensor out = t.value(a);
  for (double &v : out.values())
    v = v > 0.0 ? v : 0.0;
  return t.record(std::move(out), {a}, [a](Tape &tape, const Tensor &g) {
    if (Tensor *ga = tape.gradient_slot(a)) {
      const Tensor &A = tape.value(a);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (A[i] > 0.0)
          (*ga)[i] += g[i];
    }
  });
}

Var mean(Var a, int axis) {
  Tape &t = tape_of(a);
  const Tensor &A = t.value(a);
  const std::size_t rows = A.rows();
  const std::size_t cols = A.cols();
  if (axis != 0 && axis != 1)
    throw ShapeError("mean axis must be 0 or 1");
  if ((axis == 0 && rows == 0) || (axis == 1 && cols == 0))
    throw ShapeError("mean over an empty axis");
  if (axis == 0) {
    Tensor out(matrix_shape(1, cols));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        out[c] += A[r * cols + c];
    for (double &v : out.values())
      v /= static_cast<double>(rows);
    return t.record(std::move(out), {a},
                    [a, rows, cols](Tape &tape, const Tensor &g) {
                      if (Tensor *ga = tape.gradient_slot(a))
                        for (std::size_t r = 0; r < rows; ++r)
                          for (std::size_t c = 0; c < cols; ++c)
                            (*ga)[r * cols + c] +=
                                g[c] / static_cast<double>(rows);
                    });
  }
  Tensor out(matrix_shape(rows, 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c)
      out[r] += A[r * cols + c];
    out[r] /= static_cast<double>(cols);
  }
  return t.record(std::move(out), {a},
                  [a, rows, cols](Tape &tape, const Tensor &g) {
                    if (Tensor *ga = tape.gradient_slot(a))
                      for (std::size_t r = 0; r < rows; ++r)
                        for (std::size_t c = 0; c < cols; ++c)
                          (*ga)[r * cols + c] +=
                              g[r] / static_cast<double>(cols);
                  });
}

Var sum(Var a) {
  Tape &t = tape_of(a);
  double total = 0.0;
  for (double v : t.value(a).values())
    total += v;
  return t.record(Tensor::scalar(total), {a}, [a](Tape &tape, const Tensor &g) {
    if (Tensor *ga = tape.gradient_slot(a))
      for (double &v : ga->values())
        v += g[0];
  });
}

Var concat(std::span<const Var> parts, int axis) {
  if (parts.empty())
    throw ShapeError("concat of zero tensors");
  if (axis != 0 && axis != 1)
    throw ShapeError("concat axis must be 0 or 1");
  Tape &t = tape_of(parts.front());
  std::vector<Var> inputs(parts.begin(), parts.end());
  std::vector<std::size_t> offsets;
  std::size_t rows = 0, cols = 0;
  for (Var p : inputs) {
    tape_of(p, parts.front());
    const Tensor &T = t.value(p);
    if (axis == 1) {
      if (offsets.empty())
        rows = T.rows();
      else if (T.rows() != rows)
        throw ShapeError("concat(axis=1) row mismatch");
      offsets.push_back(cols);
      cols += T.cols();
    } else {
      if (offsets.empty())
        cols = T.cols();
      else if (T.cols() != cols)
        throw ShapeError("concat(axis=0) column mismatch");
      offsets.push_back(rows);
      rows += T.rows();
    }
  }
  Tensor out(matrix_shape(rows, cols));
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Tensor &T = t.value(inputs[k]);
    for (std::size_t r = 0; r < T.rows(); ++r)
      for (std::size_t c = 0; c < T.cols(); ++c) {
        const std::size_t orow = axis == 0 ? offsets[k] + r : r;
        const std::size_t ocol = axis == 1 ? offsets[k] + c : c;
        out[orow * cols + ocol] = T[r * T.cols() + c];
      }
  }

  Tape::Backward backward = [inputs, offsets, axis, cols](Tape &tape,
                                                          const Tensor &g) {
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      Tensor *gk = tape.gradient_slot(inputs[k]);
      if (gk == nullptr)
        continue;
      const std::size_t kr = gk->rows(), kc = gk->cols();
      for (std::size_t r = 0; r < kr; ++r)
        for (std::size_t c = 0; c < kc; ++c) {
          const std::size_t orow = axis == 0 ? offsets[k] + r : r;
          const std::size_t ocol = axis == 1 ? offsets[k] + c : c;
          (*gk)[r * kc + c] += g[orow * cols + ocol];
        }
    }
  };
  return t.record(std::move(out), std::span<const Var>(inputs),
                  std::move(backward));
}

Var concat(std::initializer_list<Var> parts, int axis) {
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

Var gather_rows(Var a, std::span<const std::size_t> index) {
  Tape &t = tape_of(a);
  const Tensor &A = t.value(a);
  const std::size_t cols = A.cols();
  Tensor out(matrix_shape(index.size(), cols));
  for (std::size_t e = 0; e < index.size(); ++e) {
    if (index[e] >= A.rows())
      throw ShapeError("gather_rows index out of range");
    std::copy_n(A.data() + index[e] * cols, cols, out.data() + e * cols);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return t.record(std::move(out), {a},
                  [a, idx = std::move(idx), cols](Tape &tape, const Tensor &g) {
                    if (Tensor *ga = tape.gradient_slot(a))
                      for (std::size_t e = 0; e < idx.size(); ++e)
                        for (std::size_t c = 0; c < cols; ++c)
                          (*ga)[idx[e] * cols + c] += g[e * cols + c];
                  });
}

Var scatter_mean(Var a, std::span<const std::size_t> index, std::size_t rows) {
  Tape &t = tape_of(a);
  const Tensor &A = t.value(a);
  if (A.rows() != index.size())
    throw ShapeError("scatter_mean needs one index per row");
  const std::size_t cols = A.cols();
  std::vector<double> count(rows, 0.0);
  for (std::size_t dst : index) {
    if (dst >= rows)
      throw ShapeError("scatter_mean index out of range");
    count[dst] += 1.0;
  }
  Tensor out(matrix_shape(rows, cols));
  for (std::size_t e = 0; e < index.size(); ++e)
    for (std::size_t c = 0; c < cols; ++c)
      out[index[e] * cols + c] += A[e * cols + c] / count[index[e]];
  std::vector<std::size_t> idx(index.begin(), index.end());
  return t.record(std::move(out), {a},
                  [a, idx = std::move(idx), count = std::move(count),
                   cols](Tape &tape, const Tensor &g) {
                    if (Tensor *ga = tape.gradient_slot(a))
                      for (std::size_t e = 0; e < idx.size(); ++e)
                        for (std::size_t c = 0; c < cols; ++c)
                          (*ga)[e * cols + c] +=
                              g[idx[e] * cols + c] / count[idx[e]];
                  });
}

Var edge_matvec(Var w, Var x) {
  Tape &t = tape_of(w, x);
  const Tensor &W = t.value(w);
  const Tensor &X = t.value(x);
  const std::size_t edges = X.rows();
  const std::size_t in = X.cols();
  if (W.rows() != edges || in == 0 || W.cols() % in != 0)
    throw ShapeError("edge_matvec shape mismatch " + shape_string(W.shape()) +
                     " vs " + shape_string(X.shape()));
  const std::size_t out_dim = W.cols() / in;
  Tensor out(matrix_shape(edges, out_dim));
  for (std::size_t e = 0; e < edges; ++e) {
    const ConstMatrixMap m(W.data() + e * W.cols(),
                           static_cast<Eigen::Index>(out_dim),
                           static_cast<Eigen::Index>(in));
    const Eigen::Map<const Eigen::VectorXd> xv(X.data() + e * in,
                                               static_cast<Eigen::Index>(in));
    Eigen::Map<Eigen::VectorXd> ov(out.data() + e * out_dim,
                                   static_cast<Eigen::Index>(out_dim));
    ov.noalias() = m * xv;
  }
  return t.record(
      std::move(out), {w, x},
      [w, x, edges, in, out_dim](Tape &tape, const Tensor &g) {
        Tensor *gw = tape.gradient_slot(w);
        Tensor *gx = tape.gradient_slot(x);
        const Tensor &W = tape.value(w);
        const Tensor &X = tape.value(x);
        for (std::size_t e = 0; e < edges; ++e) {
          const Eigen::Map<const Eigen::VectorXd> gv(
              g.data() + e * out_dim, static_cast<Eigen::Index>(out_dim));
          if (gw != nullptr) {
            MatrixMap gm(gw->data() + e * W.cols(),
                         static_cast<Eigen::Index>(out_dim),
                         static_cast<Eigen::Index>(in));
            const Eigen::Map<const Eigen::RowVectorXd> xv(
                X.data() + e * in, static_cast<Eigen::Index>(in));
            gm.noalias() += gv * xv;
          }
          if (gx != nullptr) {
            const ConstMatrixMap m(W.data() + e * W.cols(),
                                   static_cast<Eigen::Index>(out_dim),
                                   static_cast<Eigen::Index>(in));
            Eigen::Map<Eigen::VectorXd> xg(gx->data() + e * in,
                                           static_cast<Eigen::Index>(in));
            xg.noalias() += m.transpose() * gv;
          }
        }
      });
}

Var masked_mean(Var a, const std::vector<bool> &mask) {
  Tape &t = tape_of(a);
  const Tensor &A = t.value(a);
  if (mask.size() != A.rows())
    throw ShapeError("mask length " + std::to_string(mask.size()) +
                     " does not match " + std::to_string(A.rows()) + " rows");
  const std::size_t cols = A.cols();
  const auto selected =
      static_cast<double>(std::count(mask.begin(), mask.end(), true));
  Tensor out(matrix_shape(1, cols));
  if (selected > 0)
    for (std::size_t r = 0; r < A.rows(); ++r)
      if (mask[r])
        for (std::size_t c = 0; c < cols; ++c)
          out[c] += A[r * cols + c] / selected;
  return t.record(std::move(out), {a},
                  [a, mask, selected, cols](Tape &tape, const Tensor &g) {
                    Tensor *ga = tape.gradient_slot(a);
                    if (ga == nullptr || selected == 0)
                      return;
                    for (std::size_t r = 0; r < mask.size(); ++r)
                      if (mask[r])
                        for (std::size_t c = 0; c < cols; ++c)
                          (*ga)[r * cols + c] += g[c] / selected;
                  });
}

// ---- batch normalization --------------------------------------------------

namespace {

void check_affine(const Tensor &X, const Tensor &gamma, const Tensor &beta) {
  if (gamma.size() != X.cols() || beta.size() != X.cols())
    throw ShapeError("batchnorm scale/shift must have one entry per column");
}

} // namespace

Var batchnorm_train(Var x, Var gamma, Var beta, BatchStats *stats, double eps) {
  Tape &t = tape_of(x, gamma);
  tape_of(x, beta);
  const Tensor &X = t.value(x);
  check_affine(X, t.value(gamma), t.value(beta));
  const std::size_t n = X.rows();
  const std::size_t m = X.cols();
  if (n == 0)
    throw ShapeError("batchnorm over zero rows");

  Tensor mu(Shape{m}), var(Shape{m});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c)
      mu[c] += X[r * m + c];
  for (std::size_t c = 0; c < m; ++c)
    mu[c] /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c) {
      const double d = X[r * m + c] - mu[c];
      var[c] += d * d;
    }
  for (std::size_t c = 0; c < m; ++c)
    var[c] /= static_cast<double>(n);

  std::vector<double> inv_std(m);
  for (std::size_t c = 0; c < m; ++c)
    inv_std[c] = 1.0 / std::sqrt(var[c] + eps);
  Tensor xhat(matrix_shape(n, m));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c)
      xhat[r * m + c] = (X[r * m + c] - mu[c]) * inv_std[c];

  const Tensor &G = t.value(gamma);
  const Tensor &B = t.value(beta);
  Tensor out(matrix_shape(n, m));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c)
      out[r * m + c] = G[c] * xhat[r * m + c] + B[c];

  if (stats != nullptr)
    *stats = BatchStats{mu, var};

  return t.record(
      std::move(out), {x, gamma, beta},
      [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std), n,
       m](Tape &tape, const Tensor &g) {
        if (Tensor *gg = tape.gradient_slot(gamma))
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c)
              (*gg)[c] += g[r * m + c] * xhat[r * m + c];
        if (Tensor *gb = tape.gradient_slot(beta))
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c)
              (*gb)[c] += g[r * m + c];
        Tensor *gx = tape.gradient_slot(x);
        if (gx == nullptr)
          return;
        const Tensor &G = tape.value(gamma);
        const double count = static_cast<double>(n);
        for (std::size_t c = 0; c < m; ++c) {
          double sum_g = 0.0, sum_gx = 0.0;
          for (std::size_t r = 0; r < n; ++r) {
            sum_g += g[r * m + c];
            sum_gx += g[r * m + c] * xhat[r * m + c];
          }
          const double k = G[c] * inv_std[c] / count;
          for (std::size_t r = 0; r < n; ++r)
            (*gx)[r * m + c] +=
                k * (count * g[r * m + c] - sum_g - xhat[r * m + c] * sum_gx);
        }
      });
}

Var batchnorm_eval(Var x, Var gamma, Var beta, const RunningStats &running,
                   double eps) {
  if (!running.initialized)
    throw std::logic_error(
        "batchnorm in eval mode before any training batch");
  Tape &t = tape_of(x, gamma);
  tape_of(x, beta);
  const Tensor &X = t.value(x);
  check_affine(X, t.value(gamma), t.value(beta));
  const std::size_t n = X.rows();
  const std::size_t m = X.cols();
  if (running.mean.size() != m || running.var.size() != m)
    throw ShapeError("running statistics width mismatch");

  std::vector<double> inv_std(m);
  for (std::size_t c = 0; c < m; ++c)
    inv_std[c] = 1.0 / std::sqrt(running.var[c] + eps);
  Tensor xhat(matrix_shape(n, m));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c)
      xhat[r * m + c] = (X[r * m + c] - running.mean[c]) * inv_std[c];

  const Tensor &G = t.value(gamma);
  const Tensor &B = t.value(beta);
  Tensor out(matrix_shape(n, m));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c)
      out[r * m + c] = G[c] * xhat[r * m + c] + B[c];

  return t.record(
      std::move(out), {x, gamma, beta},
      [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std), n,
       m](Tape &tape, const Tensor &g) {
        if (Tensor *gg = tape.gradient_slot(gamma))
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c)
              (*gg)[c] += g[r * m + c] * xhat[r * m + c];
        if (Tensor *gb = tape.gradient_slot(beta))
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c)
              (*gb)[c] += g[r * m + c];
        if (Tensor *gx = tape.gradient_slot(x)) {
          const Tensor &G = tape.value(gamma);
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c)
              (*gx)[r * m + c] += g[r * m + c] * G[c] * inv_std[c];
        }
      });
}

void update_running_stats(RunningStats &running, const BatchStats &batch,
                          double momentum) {
  const std::size_t m = batch.mean.size();
  if (!running.initialized || running.mean.size() != m) {
    running.mean = Tensor(Shape{m}, 0.0);
    running.var = Tensor(Shape{m}, 1.0);
    running.initialized = true;
  }
  for (std::size_t c = 0; c < m; ++c) {
    running.mean[c] = (1.0 - momentum) * running.mean[c] + momentum * batch.mean[c];
    running.var[c] = (1.0 - momentum) * running.var[c] + momentum * batch.var[c];
  }
}

} // namespace cliffkit::ad
