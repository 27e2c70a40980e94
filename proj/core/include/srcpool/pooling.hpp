#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "srcpool/graph.hpp"

namespace srcpool {

enum class SelectionKind {
  Dense,        ///< full N x K score matrix
  SparseIndex,  ///< one (node, supernode, score) triple per selected node
};

/**
 * Output of a selection function: an N x K nonnegative membership matrix S.
 *
 * Dense selections store S explicitly. Sparse-index selections store, for each
 * selected node, the supernode it feeds and its score; every selected node has
 * exactly one nonzero. An optional gate (one value per selected node) scales
 * the features of gated operators such as Top-K and enters the lift as
 * gate * S. Unselected nodes have an all-zero row.
 */
class SelectOutput {
 public:
  SelectOutput() = default;

  /// Throws PoolingError on negative or non-finite entries.
  static SelectOutput dense(Matrix s);

  static SelectOutput sparse_index(Index num_nodes, Index num_supernodes, std::vector<Index> nodes,
                                   std::vector<Index> supernodes, Vector scores,
                                   std::optional<Vector> gate = std::nullopt);

  /// Supernode k is node `nodes[k]` with score 1 (subsampling selections).
  static SelectOutput from_indices(Index num_nodes, std::vector<Index> nodes,
                                   std::optional<Vector> gate = std::nullopt);

  SelectionKind kind() const noexcept { return kind_; }
  Index num_nodes() const noexcept { return n_; }
  Index num_supernodes() const noexcept { return k_; }

  /// S as an N x K matrix.
  Matrix matrix() const;
  /// S zero-padded to N x k_bar columns (k_bar >= K).
  Matrix embedded(Index k_bar) const;
  /// gate * S for gated selections, S otherwise.
  Matrix gated_matrix() const;

  /// S^T x without materialising S for sparse selections.
  Matrix transpose_times(const Matrix& x) const;
  /// S^T A S for a (sparse) adjacency.
  Matrix contract(const SparseMatrix& adjacency) const;

  std::span<const Index> nodes() const noexcept { return nodes_; }
  std::span<const Index> supernodes() const noexcept { return supernodes_; }
  const Vector& scores() const noexcept { return scores_; }
  const std::optional<Vector>& gate() const noexcept { return gate_; }
  const Matrix& dense_scores() const noexcept { return dense_; }

  /// Number of nonzero memberships in each supernode.
  std::vector<Index> supernode_sizes() const;

 private:
  SelectionKind kind_ = SelectionKind::Dense;
  Index n_ = 0;
  Index k_ = 0;
  Matrix dense_;
  std::vector<Index> nodes_;
  std::vector<Index> supernodes_;
  Vector scores_;
  std::optional<Vector> gate_;
};

/// Pooled graph G' = (X', A') plus provenance.
struct PooledGraph {
  Matrix x;  ///< K x F'
  Matrix a;  ///< K x K symmetric, nonnegative, zero diagonal
  SelectOutput selection;
  std::string operator_id;

  Index num_supernodes() const noexcept { return x.rows(); }
  /// Edge-list view of the pooled graph (entries <= threshold are dropped).
  Graph to_graph(double threshold = 0.0) const;
};

struct FixedK {
  Index k = 1;
};
struct RatioK {
  double ratio = 0.5;
};
struct AutoK {};
using KPolicy = std::variant<FixedK, RatioK, AutoK>;

/// Taxonomy flags of a pooling operator.
struct OperatorDescriptor {
  bool trainable = false;
  bool dense = false;
  bool fixed = false;
  bool hierarchical = true;
  KPolicy k_policy = AutoK{};

  /// Global pooling (readout): fixed with K = 1.
  bool is_global() const noexcept;
};

/// Supernode count implied by `policy` for an N-node input; nullopt for AutoK.
std::optional<Index> resolve_k(const KPolicy& policy, Index n);

/**
 * A pooling operator split into its select, reduce and connect functions.
 *
 * reduce() and connect() receive the full input graph together with the
 * selection, so their result may depend on the whole topology; most operators
 * only use S. reduce() returns all K reduced feature rows at once and
 * connect() the K x K matrix of edge weights, where 0 encodes "no edge".
 */
class PoolingOperator {
 public:
  virtual ~PoolingOperator() = default;

  virtual std::string id() const = 0;
  virtual OperatorDescriptor descriptor() const = 0;

  virtual SelectOutput select(const Graph& g) const = 0;
  virtual Matrix reduce(const Graph& g, const SelectOutput& sel) const = 0;
  virtual Matrix connect(const Graph& g, const SelectOutput& sel) const = 0;
};

/// S = I_N, X' = X, A' = A.
class IdentityPooling final : public PoolingOperator {
 public:
  std::string id() const override { return "identity"; }
  OperatorDescriptor descriptor() const override;
  SelectOutput select(const Graph& g) const override;
  Matrix reduce(const Graph& g, const SelectOutput& sel) const override;
  Matrix connect(const Graph& g, const SelectOutput& sel) const override;
};

/// Runs select, then reduce, then connect. Global operators get an empty edge
/// set; self-loops produced by connect are dropped.
PooledGraph pool(const Graph& g, const PoolingOperator& op);

/// Receives non-fatal diagnostics (e.g. a fixed operator upscaling a graph).
using WarningHandler = std::function<void(std::string_view)>;
/// Installs a handler and returns the previous one. The default writes to std::clog.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

/// Mean over supernodes of |S_k| / n, |S_k| counting nonzero memberships.
double density_of(const SelectOutput& sel, Index n);

/// Scalars needed to store the selection: N*K when dense, one per selected
/// node when sparse.
Index storage_count(const SelectOutput& sel);

}  // namespace srcpool
