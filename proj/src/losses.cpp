//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/losses.h"

#include <cmath>
#include <stdexcept>

namespace cliffkit {

std::string variant_name(LossVariant variant) {
  switch (variant) {
  case LossVariant::UCN: return "ucn";
  case LossVariant::N: return "n";
  case LossVariant::NGL: return "n-gl";
  case LossVariant::NSGL: return "n-sgl";
  }
  return "n";
}

LossVariant parse_variant(const std::string &name) {
  for (LossVariant v : {LossVariant::UCN, LossVariant::N, LossVariant::NGL,
                        LossVariant::NSGL})
    if (variant_name(v) == name)
      return v;
  throw std::invalid_argument("unknown loss variant '" + name +
                              "' (expected ucn, n, n-gl or n-sgl)");
}

void LossConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be a finite value >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(node_loss_weight >= 0.0) || !std::isfinite(node_loss_weight))
    throw std::invalid_argument("node_loss_weight must be a finite value >= 0");
}

namespace {

template <typename Fn> void for_group(const MpnnModel &model, ad::GroupTag tag, Fn fn) {
  for (std::size_t i = 0; i < model.parameters.size(); ++i)
    if (model.parameters[i].group == tag)
      fn(i);
}

double l2(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

double l1(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v)
    s += std::abs(x);
  return s;
}

double group_term(const PenaltyGroups &g) {
  return std::sqrt(static_cast<double>(g.beta_cn.size())) * l2(g.beta_cn) +
         std::sqrt(static_cast<double>(g.beta_ucn.size())) * l2(g.beta_ucn);
}

double soft_threshold(double x, double threshold) {
  return std::copysign(std::max(std::abs(x) - threshold, 0.0), x);
}

ad::Var squared_error(ad::Var pred, double target) {
  ad::Tape &tape = *pred.tape;
  const ad::Var diff =
      ad::sub(pred, tape.constant(ad::Tensor(pred.value().shape(), target)));
  return ad::mul(diff, diff);
}

double squared(double x) { return x * x; }

} // namespace

PenaltyGroups extract_groups(const MpnnModel &model) {
  PenaltyGroups g;
  auto collect = [&](ad::GroupTag tag, std::vector<double> &out) {
    for_group(model, tag, [&](std::size_t i) {
      const auto values = model.parameters[i].value.values();
      out.insert(out.end(), values.begin(), values.end());
    });
  };
  collect(ad::GroupTag::CommonHead, g.beta_cn);
  collect(ad::GroupTag::UncommonHead, g.beta_ucn);
  return g;
}

void assign_groups(MpnnModel &model, const PenaltyGroups &groups) {
  auto scatter = [&](ad::GroupTag tag, const std::vector<double> &in) {
    std::size_t offset = 0;
    for_group(model, tag, [&](std::size_t i) {
      for (double &v : model.parameters[i].value.values()) {
        if (offset >= in.size())
          throw std::invalid_argument("penalty group is too short");
        v = in[offset++];
      }
    });
    if (offset != in.size())
      throw std::invalid_argument("penalty group is too long");
  };
  scatter(ad::GroupTag::CommonHead, groups.beta_cn);
  scatter(ad::GroupTag::UncommonHead, groups.beta_ucn);
}

double loss_mse(double pred_i, double y_i, double pred_j, double y_j) {
  return squared(pred_i - y_i) + squared(pred_j - y_j);
}

double loss_node(const ForwardTrace &trace_i, const ForwardTrace &trace_j,
                 double y_i, double y_j, LossVariant variant) {
  double ucn = squared(trace_i.node_score_ucn.value().item() - y_i) +
               squared(trace_j.node_score_ucn.value().item() - y_j);
  if (variant == LossVariant::UCN)
    return ucn;
  double cn = squared(trace_i.node_score_cn.value().item() - y_i) +
              squared(trace_j.node_score_cn.value().item() - y_j);
  return cn + ucn;
}

double penalty_group_lasso(const PenaltyGroups &groups, double lambda) {
  return lambda * group_term(groups);
}

double penalty_sparse_group_lasso(const PenaltyGroups &groups, double lambda,
                                  double alpha) {
  return (1.0 - alpha) * lambda * group_term(groups) +
         alpha * lambda * (l1(groups.beta_cn) + l1(groups.beta_ucn));
}

double penalty(const PenaltyGroups &groups, const LossConfig &config) {
  switch (config.variant) {
  case LossVariant::NGL: return penalty_group_lasso(groups, config.lambda);
  case LossVariant::NSGL:
    return penalty_sparse_group_lasso(groups, config.lambda, config.alpha);
  default: return 0.0;
  }
}

std::vector<double> prox_group_lasso(std::span<const double> block, double t,
                                     double lambda, double p) {
  if (!(t > 0.0))
    throw std::invalid_argument("prox step must be positive");
  std::vector<double> out(block.begin(), block.end());
  const double threshold = t * lambda * std::sqrt(p);
  // A zero threshold is the identity; returning the copy keeps signed zeros.
  if (threshold == 0.0)
    return out;
  double norm = 0.0;
  for (double x : block)
    norm += x * x;
  norm = std::sqrt(norm);
  if (norm <= threshold) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  const double shrink = 1.0 - threshold / norm;
  for (double &x : out)
    x *= shrink;
  return out;
}

std::vector<double> prox_sparse_group_lasso(std::span<const double> block,
                                            double t, double lambda,
                                            double alpha, double p) {
  if (!(t > 0.0))
    throw std::invalid_argument("prox step must be positive");
  std::vector<double> soft(block.size());
  const double threshold = t * alpha * lambda;
  for (std::size_t i = 0; i < block.size(); ++i)
    soft[i] = soft_threshold(block[i], threshold);
  return prox_group_lasso(soft, t, (1.0 - alpha) * lambda, p);
}

void apply_prox(MpnnModel &model, const LossConfig &config, double t) {
  if (!config.has_penalty())
    return;
  PenaltyGroups g = extract_groups(model);
  auto prox = [&](const std::vector<double> &block) {
    const double p = static_cast<double>(block.size());
    return config.variant == LossVariant::NGL
               ? prox_group_lasso(block, t, config.lambda, p)
               : prox_sparse_group_lasso(block, t, config.lambda, config.alpha, p);
  };
  g.beta_cn = prox(g.beta_cn);
  g.beta_ucn = prox(g.beta_ucn);
  assign_groups(model, g);
}

PairLoss pair_loss(const ForwardTrace &trace_i, const ForwardTrace &trace_j,
                   double y_i, double y_j, const LossConfig &config) {
  PairLoss loss;
  loss.mse = ad::add(squared_error(trace_i.prediction, y_i),
                     squared_error(trace_j.prediction, y_j));
  loss.node = ad::add(squared_error(trace_i.node_score_ucn, y_i),
                      squared_error(trace_j.node_score_ucn, y_j));
  if (config.variant != LossVariant::UCN)
    loss.node = ad::add(ad::add(squared_error(trace_i.node_score_cn, y_i),
                                squared_error(trace_j.node_score_cn, y_j)),
                        loss.node);
  loss.total = ad::add(loss.mse, ad::scale(loss.node, config.node_loss_weight));
  return loss;
}

} // namespace cliffkit
