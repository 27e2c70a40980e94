#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "srcpool/objectives.hpp"

namespace srcpool {

enum class LossKind { Spectral, Reconstruction, AuxOnly };

struct TrainConfig {
  double learning_rate = 0.01;
  int max_epochs = 5000;
  int patience = 50;
  /// Minimum decrease of the best loss that resets the patience counter.
  double tol = 1e-6;
  std::uint64_t seed = 42;
  LossKind loss = LossKind::Spectral;
  /// Add the operator's auxiliary losses to the task loss.
  bool include_aux = true;
  /// Wall-clock budget in seconds; 0 disables it.
  double time_limit_s = 0.0;
};

enum class StopReason { MaxEpochs, EarlyStopping, TimeLimit };

struct TrainResult {
  /// Total loss evaluated at the start of every epoch.
  std::vector<double> loss_curve;
  double best_loss = 0.0;
  int best_epoch = -1;
  StopReason reason = StopReason::MaxEpochs;
};

/// Adam with the usual defaults (beta1 0.9, beta2 0.999, eps 1e-8).
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(ParamSet& params, const ParamSet& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

std::unique_ptr<Objective> make_objective(LossKind kind, const Graph& g, bool include_aux);

/// Full-batch training on one graph. Stops at max_epochs, after `patience`
/// epochs without an improvement larger than tol, or at the time limit; the
/// parameters with the lowest loss seen are restored at the end. Throws
/// TrainingError if the loss becomes NaN or infinite.
TrainResult train(TrainablePooling& op, const Graph& g, const Objective& objective,
                  const TrainConfig& cfg);
TrainResult train(TrainablePooling& op, const Graph& g, const TrainConfig& cfg);

struct GradCheckConfig {
  double step = 1e-5;
  Index max_params = 200;
  std::uint64_t seed = 42;
  /// Denominator floor of the relative error, so that gradients which are
  /// zero up to roundoff do not count as mismatches.
  double floor = 1e-7;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  Index checked = 0;
  Vector analytic;   ///< at the checked coordinates
  Vector numerical;
};

/// Central finite differences on up to max_params sampled parameters.
GradCheckResult gradient_check(TrainablePooling& op, const Graph& g, const Objective& objective,
                               const GradCheckConfig& cfg = {});

}  // namespace srcpool
