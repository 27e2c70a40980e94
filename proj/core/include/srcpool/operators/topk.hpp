#pragma once

#include <cstdint>
#include <vector>

#include "srcpool/trainable.hpp"

namespace srcpool {

enum class GateKind { Tanh, Sigmoid };

struct TopKConfig {
  double ratio = 0.5;
  GateKind gate = GateKind::Tanh;
  std::uint64_t seed = 42;
};

/// Indices of the k largest scores (ties go to the lower index), returned in
/// ascending node order.
std::vector<Index> top_k_indices(const Vector& scores, Index k);

double gate_value(GateKind kind, double y);
double gate_derivative(GateKind kind, double y);

/// Shared score-then-subsample machinery. Subclasses supply the score vector
/// and its parameter gradient; X' = gate(y_i) X_i and A' = A[i, i].
/// Gradients reach the parameters through the gate only; the kept index set
/// is treated as constant.
class ScoreSubsamplingPooling : public TrainablePooling {
 public:
  OperatorDescriptor descriptor() const override;
  SelectOutput select(const Graph& g) const override;
  Matrix reduce(const Graph& g, const SelectOutput& sel) const override;
  Matrix connect(const Graph& g, const SelectOutput& sel) const override;

  ParamSet& params() override { return params_; }
  const ParamSet& params() const override { return params_; }
  TrainableForward forward(const Graph& g) const override;
  ParamSet backward(const Graph& g, const TrainableForward& fwd,
                    const PooledGrad& grad) const override;

  virtual Vector scores(const Graph& g) const = 0;

 protected:
  explicit ScoreSubsamplingPooling(TopKConfig cfg);
  virtual ParamSet score_backward(const Graph& g, const Vector& d_scores) const = 0;

  TopKConfig cfg_;
  ParamSet params_;
};

/// y = X p / ||p||.
class TopKPooling final : public ScoreSubsamplingPooling {
 public:
  TopKPooling(Index in_features, TopKConfig cfg);
  std::string id() const override { return "topk"; }
  Vector scores(const Graph& g) const override;

 protected:
  ParamSet score_backward(const Graph& g, const Vector& d_scores) const override;
};

/// y = P X w + b with P the normalised propagation matrix (linear score).
class SagPooling final : public ScoreSubsamplingPooling {
 public:
  SagPooling(Index in_features, TopKConfig cfg);
  std::string id() const override { return "sagpool"; }
  Vector scores(const Graph& g) const override;

 protected:
  ParamSet score_backward(const Graph& g, const Vector& d_scores) const override;
};

}  // namespace srcpool
