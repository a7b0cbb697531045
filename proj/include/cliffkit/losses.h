//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_LOSSES_H_
#define CLIFFKIT_LOSSES_H_

#include <span>
#include <string>
#include <vector>

#include "cliffkit/autodiff.h"
#include "cliffkit/model.h"

namespace cliffkit {

enum class LossVariant { UCN, N, NGL, NSGL };

// "ucn", "n", "n-gl", "n-sgl".
std::string variant_name(LossVariant variant);
LossVariant parse_variant(const std::string &name);

struct LossConfig {
  LossVariant variant = LossVariant::N;
  double lambda = 1e-3;
  // Only read by the sparse group lasso variant.
  double alpha = 0.5;
  double node_loss_weight = 1.0;

  void validate() const;
  bool has_penalty() const {
    return variant == LossVariant::NGL || variant == LossVariant::NSGL;
  }
  bool operator==(const LossConfig &) const = default;
};

/// Flattened head parameters, in storage order (weight, bias, scalarize
/// weight, scalarize bias).
struct PenaltyGroups {
  std::vector<double> beta_cn;
  std::vector<double> beta_ucn;
};

PenaltyGroups extract_groups(const MpnnModel &model);

// Writes the group vectors back into the tagged tensors.
void assign_groups(MpnnModel &model, const PenaltyGroups &groups);

double loss_mse(double pred_i, double y_i, double pred_j, double y_j);

/// L_CN + L_UCN over both compounds of a pair, or L_UCN alone for the UCN
/// variant. The traces must come from the pair-masked forward.
double loss_node(const ForwardTrace &trace_i, const ForwardTrace &trace_j,
                 double y_i, double y_j, LossVariant variant);

double penalty_group_lasso(const PenaltyGroups &groups, double lambda);
double penalty_sparse_group_lasso(const PenaltyGroups &groups, double lambda,
                                  double alpha);
// The penalty selected by the variant (zero for UCN and N).
double penalty(const PenaltyGroups &groups, const LossConfig &config);

/// Block soft-threshold: the minimizer of
/// 0.5 * ||b - z||^2 + t * lambda * sqrt(p) * ||b||_2.
std::vector<double> prox_group_lasso(std::span<const double> block, double t,
                                     double lambda, double p);

/// Elementwise soft-threshold at t * alpha * lambda, then block
/// soft-threshold at t * (1 - alpha) * lambda * sqrt(p).
std::vector<double> prox_sparse_group_lasso(std::span<const double> block,
                                            double t, double lambda,
                                            double alpha, double p);

// Applies the variant's prox to both head groups in place; no-op for UCN/N.
void apply_prox(MpnnModel &model, const LossConfig &config, double t);

/// Smooth part of the pair objective on the tape.
struct PairLoss {
  ad::Var mse;
  ad::Var node;
  ad::Var total; // mse + node_loss_weight * node
};

PairLoss pair_loss(const ForwardTrace &trace_i, const ForwardTrace &trace_j,
                   double y_i, double y_j, const LossConfig &config);

} // namespace cliffkit

#endif // CLIFFKIT_LOSSES_H_
