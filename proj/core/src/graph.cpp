#include "srcpool/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace srcpool {

Graph::Graph(Index n, std::vector<Edge> edges, Matrix features, std::optional<Matrix> coords)
    : n_(n), edges_(std::move(edges)), features_(std::move(features)), coords_(std::move(coords)) {
  if (n_ < 0) throw GraphError("negative node count");
  if (features_.rows() != n_) {
    throw GraphError("feature matrix has " + std::to_string(features_.rows()) +
                     " rows, expected " + std::to_string(n_));
  }
  if (coords_ && coords_->rows() != n_) {
    throw GraphError("coordinate matrix has " + std::to_string(coords_->rows()) +
                     " rows, expected " + std::to_string(n_));
  }
  for (auto& e : edges_) {
    if (e.i < 0 || e.j < 0 || e.i >= n_ || e.j >= n_) {
      throw GraphError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                       ") out of range for " + std::to_string(n_) + " nodes");
    }
    if (e.i == e.j) throw GraphError("self-loop at node " + std::to_string(e.i));
    if (!std::isfinite(e.weight) || e.weight <= 0.0) {
      throw GraphError("edge weights must be finite and strictly positive");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  auto dup = std::adjacent_find(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.i == b.i && a.j == b.j;
  });
  if (dup != edges_.end()) {
    throw GraphError("duplicate edge (" + std::to_string(dup->i) + ", " + std::to_string(dup->j) +
                     ")");
  }
}

Graph Graph::with_features(Matrix features) const {
  return Graph(n_, edges_, std::move(features), coords_);
}

Matrix Graph::dense_adjacency() const {
  Matrix a = Matrix::Zero(n_, n_);
  for (const auto& e : edges_) {
    a(e.i, e.j) = e.weight;
    a(e.j, e.i) = e.weight;
  }
  return a;
}

SparseMatrix Graph::sparse_adjacency() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * edges_.size());
  for (const auto& e : edges_) {
    triplets.emplace_back(e.i, e.j, e.weight);
    triplets.emplace_back(e.j, e.i, e.weight);
  }
  SparseMatrix a(n_, n_);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Vector Graph::degrees() const {
  Vector d = Vector::Zero(n_);
  for (const auto& e : edges_) {
    d(e.i) += e.weight;
    d(e.j) += e.weight;
  }
  return d;
}

namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

bool operator==(const Graph& a, const Graph& b) {
  if (a.n_ != b.n_ || a.edges_ != b.edges_ || !same_matrix(a.features_, b.features_)) return false;
  if (a.coords_.has_value() != b.coords_.has_value()) return false;
  return !a.coords_ || same_matrix(*a.coords_, *b.coords_);
}

Matrix laplacian_from_adjacency(const Matrix& adjacency, LaplacianKind kind) {
  const Index n = adjacency.rows();
  Matrix a = adjacency;
  a.diagonal().setZero();
  const Vector d = a.rowwise().sum();
  if (kind == LaplacianKind::Combinatorial) {
    Matrix l = -a;
    l.diagonal() = d;
    return l;
  }
  Vector inv_sqrt(n);
  for (Index i = 0; i < n; ++i) inv_sqrt(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
  Matrix l = -(inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal());
  for (Index i = 0; i < n; ++i) l(i, i) = d(i) > 0.0 ? 1.0 : 0.0;
  return l;
}

Matrix laplacian(const Graph& g, LaplacianKind kind) {
  return laplacian_from_adjacency(g.dense_adjacency(), kind);
}

Graph graph_from_adjacency(const Matrix& adjacency, Matrix features, std::optional<Matrix> coords,
                           double threshold) {
  std::vector<Edge> edges;
  for (Index i = 0; i < adjacency.rows(); ++i) {
    for (Index j = i + 1; j < adjacency.cols(); ++j) {
      const double w = adjacency(i, j);
      if (std::abs(w) > threshold && w > 0.0) edges.push_back({i, j, w});
    }
  }
  return Graph(adjacency.rows(), std::move(edges), std::move(features), std::move(coords));
}

namespace {

Index find_root(std::vector<Index>& parent, Index x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<Index> connected_components(const Graph& g) {
  const auto n = static_cast<std::size_t>(g.num_nodes());
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  for (const auto& e : g.edges()) {
    const Index a = find_root(parent, e.i);
    const Index b = find_root(parent, e.j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<Index> label(n, -1);
  std::vector<Index> root_label(n, -1);
  Index next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto r = static_cast<std::size_t>(find_root(parent, static_cast<Index>(v)));
    if (root_label[r] < 0) root_label[r] = next++;
    label[v] = root_label[r];
  }
  return label;
}

}  // namespace srcpool
