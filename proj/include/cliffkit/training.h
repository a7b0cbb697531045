//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_TRAINING_H_
#define CLIFFKIT_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cliffkit/losses.h"
#include "cliffkit/model.h"
#include "cliffkit/pairs.h"

namespace cliffkit {

/// Nodes that share batchnorm statistics in a training step: both compounds
/// of the pair, or each compound on its own.
enum class BatchNormScope { Pair, Compound };

std::string batchnorm_scope_name(BatchNormScope scope);
BatchNormScope parse_batchnorm_scope(const std::string &name);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t max_epochs = 300;
  std::size_t patience = 20;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  BatchNormScope batchnorm_scope = BatchNormScope::Pair;

  void validate() const;
  bool operator==(const TrainConfig &) const = default;
};

// Minimum validation improvement that resets the patience counter.
inline constexpr double kEarlyStoppingDelta = 1e-6;

/// Adaptive-moment optimizer with bias correction, one moment pair per
/// parameter tensor.
class Adam {
public:
  Adam(const MpnnModel &model, const TrainConfig &config);

  // `gradients` follows MpnnModel::parameters order.
  void step(MpnnModel &model, const std::vector<ad::Tensor> &gradients);

  std::size_t steps() const { return steps_; }

private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t steps_ = 0;
  std::vector<ad::Tensor> m_, v_;
};

struct EpochRecord {
  std::size_t epoch = 0; // 1-based
  // Means over the epoch's training pairs.
  double mse = 0.0;
  double node = 0.0;
  // Penalty of the parameters at the end of the epoch.
  double penalty = 0.0;
  double validation_rmse = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t stopped_epoch = 0;
  std::size_t best_epoch = 0;
  double best_validation_rmse = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  MpnnModel model; // parameters from best_epoch
  TrainReport report;
};

class DivergenceError : public std::runtime_error {
public:
  DivergenceError(std::size_t epoch, const std::string &pair_id)
      : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                           ", pair " + pair_id),
        epoch_(epoch), pair_id_(pair_id) {}

  std::size_t epoch() const { return epoch_; }
  const std::string &pair_id() const { return pair_id_; }

private:
  std::size_t epoch_;
  std::string pair_id_;
};

using EpochCallback = std::function<void(const EpochRecord &)>;

/// Per-pair updates in a seeded shuffled order: both compounds are forwarded
/// with their pair masks in train mode, the smooth loss is back-propagated,
/// every parameter takes an Adam step and, for the penalized variants, the
/// head groups take a prox step of size learning_rate. Validation RMSE is
/// measured after each epoch; training stops once `patience` epochs pass
/// without an improvement above kEarlyStoppingDelta.
TrainResult train(const MpnnModel &initial, const DatasetSplit &split,
                  const LossConfig &loss, const TrainConfig &config,
                  const EpochCallback &on_epoch = {});

struct SplitEvaluation {
  // Two entries per pair: compound i, then compound j.
  std::vector<double> predictions;
  std::vector<double> targets;
  std::vector<std::string> compound_ids;
  double rmse = 0.0;
  double pcc = 0.0;
  bool pcc_defined = false;
};

/// Pair-masked eval-mode predictions for every compound occurrence. PCC is
/// flagged undefined (not thrown) when a series is constant; use pcc() for
/// the strict form.
SplitEvaluation evaluate_split(const MpnnModel &model,
                               const std::vector<CliffPair> &pairs);

} // namespace cliffkit

#endif // CLIFFKIT_TRAINING_H_
