#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srcpool/pooling.hpp"

namespace srcpool {

struct GraclusConfig {
  /// Nodes are visited in ascending index unless a shuffle seed is given.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Greedy heavy-edge matching with normalised-cut weights A_ij/D_ii + A_ij/D_jj.
/// Returns a cluster label per node; labels follow the visiting order.
std::vector<Index> graclus_matching(const Graph& g, const GraclusConfig& cfg = {});

/// Each node feeds its cluster with score 1/|cluster|, so S^T X is the
/// cluster centroid and the lift (S^+)^T copies it back to every member.
class GraclusPooling final : public PoolingOperator {
 public:
  explicit GraclusPooling(GraclusConfig cfg = {}) : cfg_(cfg) {}

  std::string id() const override { return "graclus"; }
  OperatorDescriptor descriptor() const override;
  SelectOutput select(const Graph& g) const override;
  Matrix reduce(const Graph& g, const SelectOutput& sel) const override;
  /// Total edge weight between clusters, self-loops dropped.
  Matrix connect(const Graph& g, const SelectOutput& sel) const override;

 private:
  GraclusConfig cfg_;
};

}  // namespace srcpool
