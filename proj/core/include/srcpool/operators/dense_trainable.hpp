#pragma once

#include <cstdint>

#include "srcpool/trainable.hpp"

namespace srcpool {

struct MinCutConfig {
  Index k = 1;
  Index hidden = 32;
  std::uint64_t seed = 42;
};

/// S = softmax(MLP(X)), X' = S^T X, A' = S^T A S.
/// Auxiliary losses: cut = -Tr(S^T A S)/Tr(S^T D S) and
/// ortho = ||S^T S/||S^T S||_F - I/sqrt(K)||_F.
class MinCutPooling final : public TrainablePooling {
 public:
  MinCutPooling(Index in_features, MinCutConfig cfg);

  std::string id() const override { return "mincut"; }
  OperatorDescriptor descriptor() const override;
  SelectOutput select(const Graph& g) const override;
  Matrix reduce(const Graph& g, const SelectOutput& sel) const override;
  Matrix connect(const Graph& g, const SelectOutput& sel) const override;

  ParamSet& params() override { return params_; }
  const ParamSet& params() const override { return params_; }
  TrainableForward forward(const Graph& g) const override;
  ParamSet backward(const Graph& g, const TrainableForward& fwd,
                    const PooledGrad& grad) const override;

 private:
  Matrix assignment(const Graph& g, Matrix* hidden_pre) const;

  MinCutConfig cfg_;
  ParamSet params_;
};

struct DiffPoolConfig {
  Index k = 1;
  std::uint64_t seed = 42;
};

/// S = softmax(GNN_1(A, X)), X' = S^T GNN_2(A, X), A' = S^T A S, with each
/// GNN a single propagation layer. GNN_2 keeps the feature width.
/// Auxiliary losses: link = ||A - S S^T||_F / N^2 and mean row entropy of S.
class DiffPoolPooling final : public TrainablePooling {
 public:
  DiffPoolPooling(Index in_features, DiffPoolConfig cfg);

  std::string id() const override { return "diffpool"; }
  OperatorDescriptor descriptor() const override;
  SelectOutput select(const Graph& g) const override;
  Matrix reduce(const Graph& g, const SelectOutput& sel) const override;
  Matrix connect(const Graph& g, const SelectOutput& sel) const override;

  ParamSet& params() override { return params_; }
  const ParamSet& params() const override { return params_; }
  TrainableForward forward(const Graph& g) const override;
  ParamSet backward(const Graph& g, const TrainableForward& fwd,
                    const PooledGrad& grad) const override;

 private:
  DiffPoolConfig cfg_;
  ParamSet params_;
};

}  // namespace srcpool
