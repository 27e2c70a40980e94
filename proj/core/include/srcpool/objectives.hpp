#pragma once

#include <memory>
#include <string>

#include "srcpool/trainable.hpp"

namespace srcpool {

/// x_c^T L x_c for every column c, with L the combinatorial Laplacian of a
/// dense adjacency (diagonal ignored).
Vector quadratic_forms(const Matrix& adjacency, const Matrix& x);

/// Result of lifting pooled features back to the input nodes.
struct LiftResult {
  Matrix x_lifted;         ///< U X' with U = (S^+)^T
  Matrix x_reconstructed;  ///< after the least-squares post-map
  double mse = 0.0;
  Matrix d_selection;  ///< d mse / d S (only when gradients were requested)
  Matrix d_x_pooled;   ///< d mse / d X'
};

/**
 * Reconstruction of `target` (N x F) from pooled features.
 *
 * X' is lifted with U = S (S^T S)^+ = (S^+)^T, then a linear post-map on
 * [U X', D^{-1} A U X', 1] is fitted to the target by least squares. The
 * map is refit on every call, so gradients treat it as constant (it is
 * optimal, hence its own gradient vanishes). The S gradient assumes the rank
 * of S is locally constant.
 */
LiftResult lift_reconstruct(const Graph& g, const Matrix& target, const Matrix& s,
                            const Matrix& x_pooled, bool need_grad);

struct LossEvaluation {
  double total = 0.0;
  double task = 0.0;
  double aux = 0.0;
  PooledGrad grad;
};

/// Scalar training objective over one forward pass.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::string name() const = 0;
  virtual LossEvaluation evaluate(const Graph& g, const TrainableForward& fwd,
                                  bool need_grad) const = 0;
};

/**
 * Mean over signal columns of |x^T L x - x'^T L' x'|, where the signal is the
 * graph's feature matrix, x' the pooled features and L' the Laplacian of the
 * pooled adjacency. Optionally adds the operator's auxiliary losses.
 */
class SpectralObjective final : public Objective {
 public:
  SpectralObjective(const Graph& g, bool include_aux);
  std::string name() const override { return "spectral"; }
  LossEvaluation evaluate(const Graph& g, const TrainableForward& fwd,
                          bool need_grad) const override;

 private:
  Vector q_;
  bool include_aux_;
};

/// The operator's auxiliary losses alone.
class AuxOnlyObjective final : public Objective {
 public:
  std::string name() const override { return "aux"; }
  LossEvaluation evaluate(const Graph& g, const TrainableForward& fwd,
                          bool need_grad) const override;
};

/// Reconstruction MSE of the graph features through pool and lift.
class ReconstructionObjective final : public Objective {
 public:
  explicit ReconstructionObjective(bool include_aux = false) : include_aux_(include_aux) {}
  std::string name() const override { return "reconstruction"; }
  LossEvaluation evaluate(const Graph& g, const TrainableForward& fwd,
                          bool need_grad) const override;

 private:
  bool include_aux_;
};

}  // namespace srcpool
