#include "srcpool/operators/lapool.hpp"

#include <cmath>

#include "srcpool/linalg.hpp"

namespace srcpool {

Vector lapool_signal_variation(const Graph& g, int norm_order) {
  const Matrix lx = laplacian(g) * g.features();
  Vector v(lx.rows());
  for (Index i = 0; i < lx.rows(); ++i) {
    if (norm_order == 0) v[i] = lx.row(i).cwiseAbs().maxCoeff();
    else if (norm_order == 1) v[i] = lx.row(i).lpNorm<1>();
    else if (norm_order == 2) v[i] = lx.row(i).norm();
    else v[i] = std::pow(lx.row(i).array().abs().pow(norm_order).sum(), 1.0 / norm_order);
  }
  return v;
}

std::vector<Index> lapool_leaders(const Graph& g, const Vector& v, double tol) {
  const auto n = static_cast<std::size_t>(g.num_nodes());
  std::vector<char> leader(n, 1);
  for (const Edge& e : g.edges()) {
    if (!(v[e.i] - v[e.j] > tol)) leader[static_cast<std::size_t>(e.i)] = 0;
    if (!(v[e.j] - v[e.i] > tol)) leader[static_cast<std::size_t>(e.j)] = 0;
  }
  std::vector<Index> out;
  for (std::size_t i = 0; i < n; ++i)
    if (leader[i]) out.push_back(static_cast<Index>(i));
  return out;
}

LaPoolPooling::LaPoolPooling(LaPoolConfig cfg) : cfg_(cfg) {
  if (!std::isfinite(cfg_.beta) || cfg_.beta <= 0.0) throw PoolingError("lapool: beta must be positive");
  if (cfg_.norm_order < 0) throw PoolingError("lapool: norm order must be 0 (max) or positive");
}

OperatorDescriptor LaPoolPooling::descriptor() const {
  return {.trainable = false, .dense = true, .fixed = false, .hierarchical = true,
          .k_policy = AutoK{}};
}

SelectOutput LaPoolPooling::select(const Graph& g) const {
  const Matrix& x = g.features();
  const Vector v = lapool_signal_variation(g, cfg_.norm_order);
  // The tolerance scales with the features, not with V, so shifting V leaves
  // the comparison unchanged.
  const double tol = 1e-12 * std::max(1.0, x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0);
  const auto leaders = lapool_leaders(g, v, tol);
  if (leaders.empty() || v.maxCoeff() <= tol) throw PoolingError("degenerate signal");

  const Vector norms = x.rowwise().norm();
  const auto k = static_cast<Index>(leaders.size());
  Matrix sim = Matrix::Zero(x.rows(), k);
  for (Index c = 0; c < k; ++c) {
    const Index l = leaders[static_cast<std::size_t>(c)];
    for (Index i = 0; i < x.rows(); ++i) {
      const double denom = norms[i] * norms[l];
      sim(i, c) = denom > 0.0 ? cfg_.beta * x.row(i).dot(x.row(l)) / denom : 0.0;
    }
  }
  return SelectOutput::dense(sparsemax_rows(sim));
}

Matrix LaPoolPooling::reduce(const Graph& g, const SelectOutput& sel) const {
  return sel.transpose_times(g.features());
}

Matrix LaPoolPooling::connect(const Graph& g, const SelectOutput& sel) const {
  return sel.contract(g.sparse_adjacency());
}

}  // namespace srcpool
