#pragma once

#include <optional>
#include <span>
#include <vector>

#include "srcpool/types.hpp"

namespace srcpool {

/// Undirected weighted edge, stored with i < j.
struct Edge {
  Index i = 0;
  Index j = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class LaplacianKind {
  Combinatorial,  ///< L = D - A
  SymNormalized,  ///< I - D^{-1/2} A D^{-1/2}; isolated nodes get a zero diagonal
};

/**
 * Immutable attributed graph: N nodes, an N x F feature matrix, an optional
 * N x d coordinate matrix and a list of undirected weighted edges.
 *
 * The constructor canonicalises every edge to i < j and sorts the list, so two
 * graphs built from the same edge set compare equal regardless of input order.
 * Self-loops, duplicate edges, non-positive or non-finite weights and indices
 * outside [0, N) are rejected with GraphError.
 */
class Graph {
 public:
  Graph() = default;
  Graph(Index n, std::vector<Edge> edges, Matrix features,
        std::optional<Matrix> coords = std::nullopt);

  /// Graph with the same topology and coordinates but different node features.
  Graph with_features(Matrix features) const;

  Index num_nodes() const noexcept { return n_; }
  Index num_edges() const noexcept { return static_cast<Index>(edges_.size()); }
  Index num_features() const noexcept { return features_.cols(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Matrix& features() const noexcept { return features_; }
  const std::optional<Matrix>& coords() const noexcept { return coords_; }

  /// Coordinates if present, otherwise the feature matrix.
  const Matrix& positions() const noexcept { return coords_ ? *coords_ : features_; }

  Matrix dense_adjacency() const;
  SparseMatrix sparse_adjacency() const;
  Vector degrees() const;

  /// Exact equality of node count, edges (including weights), features and coordinates.
  friend bool operator==(const Graph& a, const Graph& b);

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
  Matrix features_;
  std::optional<Matrix> coords_;
};

Matrix laplacian(const Graph& g, LaplacianKind kind = LaplacianKind::Combinatorial);

/// Laplacian of a dense symmetric nonnegative adjacency. Diagonal entries of
/// `adjacency` (self-loops) do not contribute to the combinatorial Laplacian.
Matrix laplacian_from_adjacency(const Matrix& adjacency,
                                LaplacianKind kind = LaplacianKind::Combinatorial);

/// Builds a graph from the strictly upper triangle of a dense adjacency; entries
/// with |w| <= threshold are treated as absent.
Graph graph_from_adjacency(const Matrix& adjacency, Matrix features,
                           std::optional<Matrix> coords = std::nullopt,
                           double threshold = 0.0);

/// Connected-component label per node (labels are 0..C-1 in order of first node).
std::vector<Index> connected_components(const Graph& g);

}  // namespace srcpool
