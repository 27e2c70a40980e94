#pragma once

#include <vector>

#include "srcpool/pooling.hpp"

namespace srcpool {

/// Nodes on the positive side of the top Laplacian eigenvector, computed per
/// connected component. Single-node components are always kept; a component
/// whose eigenvector has no positive entry keeps its largest entry.
std::vector<Index> ndp_keep_set(const Graph& g);

/// Node decimation: subsample the positive side of u_max and reconnect the
/// survivors through the Kron-reduced Laplacian.
class NdpPooling final : public PoolingOperator {
 public:
  std::string id() const override { return "ndp"; }
  OperatorDescriptor descriptor() const override;
  SelectOutput select(const Graph& g) const override;
  /// X' = X restricted to the kept rows.
  Matrix reduce(const Graph& g, const SelectOutput& sel) const override;
  Matrix connect(const Graph& g, const SelectOutput& sel) const override;
};

}  // namespace srcpool
