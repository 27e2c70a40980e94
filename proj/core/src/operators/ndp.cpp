#include "srcpool/operators/ndp.hpp"

#include <algorithm>

#include "srcpool/linalg.hpp"

namespace srcpool {

std::vector<Index> ndp_keep_set(const Graph& g) {
  const Index n = g.num_nodes();
  const auto comp = connected_components(g);
  const Index num_comp = n == 0 ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(num_comp));
  for (Index i = 0; i < n; ++i) members[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])].push_back(i);

  const Matrix lap = laplacian(g);
  std::vector<Index> keep;
  for (const auto& nodes : members) {
    if (nodes.size() == 1) {
      keep.push_back(nodes.front());
      continue;
    }
    const Matrix sub = lap(nodes, nodes);
    const Vector u = eigh_range(sub, EigenRange::largest()).vectors.col(0);
    bool any = false;
    for (Index t = 0; t < u.size(); ++t) {
      if (u[t] > 0.0) {
        keep.push_back(nodes[static_cast<std::size_t>(t)]);
        any = true;
      }
    }
    if (!any) {
      Index arg = 0;
      u.maxCoeff(&arg);
      keep.push_back(nodes[static_cast<std::size_t>(arg)]);
    }
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

OperatorDescriptor NdpPooling::descriptor() const {
  return {.trainable = false, .dense = false, .fixed = false, .hierarchical = true,
          .k_policy = AutoK{}};
}

SelectOutput NdpPooling::select(const Graph& g) const {
  return SelectOutput::from_indices(g.num_nodes(), ndp_keep_set(g));
}

Matrix NdpPooling::reduce(const Graph& g, const SelectOutput& sel) const {
  const auto nodes = sel.nodes();
  return g.features()(std::vector<Index>(nodes.begin(), nodes.end()), Eigen::all);
}

Matrix NdpPooling::connect(const Graph& g, const SelectOutput& sel) const {
  const Matrix reduced = kron_reduction(laplacian(g), sel.nodes());
  Matrix a = -reduced;
  a.diagonal().setZero();
  // Kron reduction of a Laplacian has nonpositive off-diagonals; clip roundoff.
  return a.cwiseMax(0.0);
}

}  // namespace srcpool
