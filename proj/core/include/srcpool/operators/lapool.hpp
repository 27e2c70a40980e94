#pragma once

#include <vector>

#include "srcpool/pooling.hpp"

namespace srcpool {

struct LaPoolConfig {
  double beta = 1.0;
  /// Order of the row norm applied to LX; 0 selects the max norm.
  int norm_order = 2;
};

/// Row-wise norm of L_sym X.
Vector lapool_signal_variation(const Graph& g, int norm_order);

/// Strict local maxima: V_i - V_j > tol for every neighbour j. Isolated nodes
/// count as leaders.
std::vector<Index> lapool_leaders(const Graph& g, const Vector& v, double tol);

/// Leaders of the signal variation become supernodes; every node is assigned
/// to them by sparsemax over beta-scaled cosine similarities.
class LaPoolPooling final : public PoolingOperator {
 public:
  explicit LaPoolPooling(LaPoolConfig cfg = {});

  std::string id() const override { return "lapool"; }
  OperatorDescriptor descriptor() const override;
  /// Throws PoolingError("degenerate signal") when no node is a leader.
  SelectOutput select(const Graph& g) const override;
  Matrix reduce(const Graph& g, const SelectOutput& sel) const override;
  Matrix connect(const Graph& g, const SelectOutput& sel) const override;

 private:
  LaPoolConfig cfg_;
};

}  // namespace srcpool
