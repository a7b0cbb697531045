//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/training.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cliffkit/evaluation.h"
#include "cliffkit/parallel.h"

namespace cliffkit {

std::string batchnorm_scope_name(BatchNormScope scope) {
  return scope == BatchNormScope::Pair ? "pair" : "compound";
}

BatchNormScope parse_batchnorm_scope(const std::string &name) {
  if (name == "pair")
    return BatchNormScope::Pair;
  if (name == "compound")
    return BatchNormScope::Compound;
  throw std::invalid_argument("unknown batchnorm scope '" + name +
                              "' (expected pair or compound)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be positive");
  if (max_epochs == 0)
    throw std::invalid_argument("max_epochs must be positive");
  if (patience >= max_epochs)
    throw std::invalid_argument("patience must be smaller than max_epochs");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("Adam moments must lie in [0, 1)");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("Adam epsilon must be positive");
}

Adam::Adam(const MpnnModel &model, const TrainConfig &config)
    : lr_(config.learning_rate), beta1_(config.beta1), beta2_(config.beta2),
      eps_(config.epsilon) {
  for (const ad::Parameter &p : model.parameters) {
    m_.push_back(ad::Tensor::zeros_like(p.value));
    v_.push_back(ad::Tensor::zeros_like(p.value));
  }
}

void Adam::step(MpnnModel &model, const std::vector<ad::Tensor> &gradients) {
  if (gradients.size() != model.parameters.size())
    throw std::invalid_argument("gradient count does not match parameters");
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(beta1_, t);
  const double correction2 = 1.0 - std::pow(beta2_, t);
  for (std::size_t k = 0; k < gradients.size(); ++k) {
    auto p = model.parameters[k].value.values();
    const auto g = gradients[k].values();
    auto m = m_[k].values();
    auto v = v_[k].values();
    if (g.size() != p.size())
      throw std::invalid_argument("gradient shape does not match parameter '" +
                                  model.parameters[k].name + "'");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double update = (m[i] / correction1) / (std::sqrt(v[i] / correction2) + eps_);
      p[i] -= lr_ * update;
    }
  }
}

namespace {

struct PreparedPair {
  const CliffPair *pair;
  GraphInputs inputs_i;
  GraphInputs inputs_j;
  GraphInputs merged;
  PairMasks masks;
};

std::vector<PreparedPair> prepare(const std::vector<CliffPair> &pairs) {
  std::vector<PreparedPair> out;
  out.reserve(pairs.size());
  for (const CliffPair &p : pairs) {
    PreparedPair pp{&p, make_inputs(p.graph_i), make_inputs(p.graph_j), {},
                    {p.common_mask_i, p.uncommon_mask_i, p.common_mask_j,
                     p.uncommon_mask_j}};
    pp.merged = merge_inputs(pp.inputs_i, pp.inputs_j);
    out.push_back(std::move(pp));
  }
  return out;
}

SplitEvaluation evaluate_prepared(const MpnnModel &model,
                                  const std::vector<PreparedPair> &pairs) {
  if (pairs.empty())
    throw std::invalid_argument("cannot evaluate an empty pair set");
  SplitEvaluation ev;
  ev.predictions.assign(2 * pairs.size(), 0.0);
  parallel_for(pairs.size(), [&](std::size_t k) {
    const PreparedPair &pp = pairs[k];
    ad::Tape tape;
    const BoundParameters params = bind_parameters(model, tape, false);
    ev.predictions[2 * k] =
        forward(model, params, pp.inputs_i, pp.pair->common_mask_i,
                pp.pair->uncommon_mask_i, Mode::Eval)
            .predicted();
    ev.predictions[2 * k + 1] =
        forward(model, params, pp.inputs_j, pp.pair->common_mask_j,
                pp.pair->uncommon_mask_j, Mode::Eval)
            .predicted();
  });
  for (const PreparedPair &pp : pairs) {
    ev.targets.push_back(pp.pair->y_i);
    ev.targets.push_back(pp.pair->y_j);
    ev.compound_ids.push_back(pp.pair->compound_i);
    ev.compound_ids.push_back(pp.pair->compound_j);
  }
  ev.rmse = rmse(ev.predictions, ev.targets);
  try {
    ev.pcc = pcc(ev.predictions, ev.targets);
    ev.pcc_defined = true;
  } catch (const UndefinedCorrelationError &) {
    ev.pcc = std::numeric_limits<double>::quiet_NaN();
    ev.pcc_defined = false;
  }
  return ev;
}

} // namespace

SplitEvaluation evaluate_split(const MpnnModel &model,
                               const std::vector<CliffPair> &pairs) {
  return evaluate_prepared(model, prepare(pairs));
}

TrainResult train(const MpnnModel &initial, const DatasetSplit &split,
                  const LossConfig &loss, const TrainConfig &config,
                  const EpochCallback &on_epoch) {
  loss.validate();
  config.validate();
  if (split.train.empty() || split.validation.empty())
    throw std::invalid_argument("training needs non-empty train and validation sets");
  const auto started = std::chrono::steady_clock::now();

  const std::vector<PreparedPair> train_pairs = prepare(split.train);
  const std::vector<PreparedPair> val_pairs = prepare(split.validation);

  MpnnModel model = initial;
  Adam optimizer(model, config);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{model, {}};
  double best = std::numeric_limits<double>::infinity();
  double reference = best;
  std::size_t stale = 0;
  std::vector<ad::Tensor> gradients(model.parameters.size());

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord record;
    record.epoch = epoch;
    for (std::size_t idx : order) {
      const PreparedPair &pp = train_pairs[idx];
      const CliffPair &pair = *pp.pair;
      ad::Tape tape;
      const BoundParameters params = bind_parameters(model, tape, true);
      PairTrace trace;
      if (config.batchnorm_scope == BatchNormScope::Pair) {
        trace = forward_pair(model, params, pp.merged, pp.inputs_i.num_atoms,
                             pp.masks, Mode::Train);
      } else {
        trace.i = forward(model, params, pp.inputs_i, pair.common_mask_i,
                          pair.uncommon_mask_i, Mode::Train);
        trace.j = forward(model, params, pp.inputs_j, pair.common_mask_j,
                          pair.uncommon_mask_j, Mode::Train);
      }
      const PairLoss pl = pair_loss(trace.i, trace.j, pair.y_i, pair.y_j, loss);
      const double total = pl.total.value().item();
      if (!std::isfinite(total))
        throw DivergenceError(epoch, pair.pair_id);
      record.mse += pl.mse.value().item();
      record.node += pl.node.value().item();

      tape.backward(pl.total);
      for (std::size_t k = 0; k < gradients.size(); ++k)
        gradients[k] = tape.gradient(params.vars[k]);
      if (config.batchnorm_scope == BatchNormScope::Pair) {
        commit_batch_stats(model, trace.batch_stats);
      } else {
        commit_batch_stats(model, trace.i);
        commit_batch_stats(model, trace.j);
      }
      optimizer.step(model, gradients);
      if (loss.has_penalty())
        apply_prox(model, loss, config.learning_rate);
    }
    const double n = static_cast<double>(train_pairs.size());
    record.mse /= n;
    record.node /= n;
    record.penalty = penalty(extract_groups(model), loss);
    record.validation_rmse = evaluate_prepared(model, val_pairs).rmse;
    if (!std::isfinite(record.validation_rmse))
      throw DivergenceError(epoch, "<validation>");
    result.report.epochs.push_back(record);
    result.report.stopped_epoch = epoch;
    if (on_epoch)
      on_epoch(record);

    if (record.validation_rmse < best) {
      best = record.validation_rmse;
      result.model = model;
      result.report.best_epoch = epoch;
      result.report.best_validation_rmse = best;
    }
    if (record.validation_rmse < reference - kEarlyStoppingDelta) {
      reference = record.validation_rmse;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

} // namespace cliffkit
