#include "srcpool/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <string>
#include <utility>

namespace srcpool {

namespace {

std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::clog << "warning: " << msg << '\n';
  };
  return handler;
}

}  // namespace

SelectOutput SelectOutput::dense(Matrix s) {
  if (!s.allFinite()) throw PoolingError("selection matrix has non-finite entries");
  if (s.size() > 0 && s.minCoeff() < 0.0) throw PoolingError("selection matrix has negative entries");
  SelectOutput out;
  out.kind_ = SelectionKind::Dense;
  out.n_ = s.rows();
  out.k_ = s.cols();
  out.dense_ = std::move(s);
  return out;
}

SelectOutput SelectOutput::sparse_index(Index num_nodes, Index num_supernodes,
                                        std::vector<Index> nodes, std::vector<Index> supernodes,
                                        Vector scores, std::optional<Vector> gate) {
  const auto m = static_cast<Index>(nodes.size());
  if (static_cast<Index>(supernodes.size()) != m || scores.size() != m)
    throw PoolingError("sparse selection: nodes, supernodes and scores differ in length");
  if (gate && gate->size() != m) throw PoolingError("sparse selection: gate length mismatch");
  std::vector<char> seen(static_cast<std::size_t>(num_nodes), 0);
  for (Index t = 0; t < m; ++t) {
    const Index i = nodes[static_cast<std::size_t>(t)];
    const Index k = supernodes[static_cast<std::size_t>(t)];
    if (i < 0 || i >= num_nodes) throw PoolingError("sparse selection: node index out of range");
    if (k < 0 || k >= num_supernodes)
      throw PoolingError("sparse selection: supernode index out of range");
    if (seen[static_cast<std::size_t>(i)]) throw PoolingError("sparse selection: node selected twice");
    seen[static_cast<std::size_t>(i)] = 1;
    if (!(scores[t] >= 0.0) || !std::isfinite(scores[t]))
      throw PoolingError("sparse selection: scores must be finite and nonnegative");
  }
  SelectOutput out;
  out.kind_ = SelectionKind::SparseIndex;
  out.n_ = num_nodes;
  out.k_ = num_supernodes;
  out.nodes_ = std::move(nodes);
  out.supernodes_ = std::move(supernodes);
  out.scores_ = std::move(scores);
  out.gate_ = std::move(gate);
  return out;
}

SelectOutput SelectOutput::from_indices(Index num_nodes, std::vector<Index> nodes,
                                        std::optional<Vector> gate) {
  const auto k = static_cast<Index>(nodes.size());
  std::vector<Index> supernodes(nodes.size());
  for (Index t = 0; t < k; ++t) supernodes[static_cast<std::size_t>(t)] = t;
  return sparse_index(num_nodes, k, std::move(nodes), std::move(supernodes), Vector::Ones(k),
                      std::move(gate));
}

Matrix SelectOutput::matrix() const { return embedded(k_); }

Matrix SelectOutput::embedded(Index k_bar) const {
  if (k_bar < k_) throw PoolingError("embedding width smaller than supernode count");
  Matrix s = Matrix::Zero(n_, k_bar);
  if (kind_ == SelectionKind::Dense) {
    s.leftCols(k_) = dense_;
  } else {
    for (std::size_t t = 0; t < nodes_.size(); ++t)
      s(nodes_[t], supernodes_[t]) = scores_[static_cast<Index>(t)];
  }
  return s;
}

Matrix SelectOutput::gated_matrix() const {
  if (!gate_) return matrix();
  Matrix s = Matrix::Zero(n_, k_);
  for (std::size_t t = 0; t < nodes_.size(); ++t) {
    const auto ti = static_cast<Index>(t);
    s(nodes_[t], supernodes_[t]) = (*gate_)[ti] * scores_[ti];
  }
  return s;
}

Matrix SelectOutput::transpose_times(const Matrix& x) const {
  if (x.rows() != n_) throw PoolingError("S^T X: row count mismatch");
  if (kind_ == SelectionKind::Dense) return dense_.transpose() * x;
  Matrix out = Matrix::Zero(k_, x.cols());
  for (std::size_t t = 0; t < nodes_.size(); ++t)
    out.row(supernodes_[t]) += scores_[static_cast<Index>(t)] * x.row(nodes_[t]);
  return out;
}

Matrix SelectOutput::contract(const SparseMatrix& adjacency) const {
  if (adjacency.rows() != n_ || adjacency.cols() != n_)
    throw PoolingError("S^T A S: adjacency size mismatch");
  if (kind_ == SelectionKind::Dense) {
    const Matrix as = adjacency * dense_;
    return dense_.transpose() * as;
  }
  std::vector<Index> super_of(static_cast<std::size_t>(n_), -1);
  std::vector<double> score_of(static_cast<std::size_t>(n_), 0.0);
  for (std::size_t t = 0; t < nodes_.size(); ++t) {
    super_of[static_cast<std::size_t>(nodes_[t])] = supernodes_[t];
    score_of[static_cast<std::size_t>(nodes_[t])] = scores_[static_cast<Index>(t)];
  }
  Matrix out = Matrix::Zero(k_, k_);
  for (Index col = 0; col < adjacency.outerSize(); ++col) {
    const Index l = super_of[static_cast<std::size_t>(col)];
    if (l < 0) continue;
    for (SparseMatrix::InnerIterator it(adjacency, col); it; ++it) {
      const Index k = super_of[static_cast<std::size_t>(it.row())];
      if (k < 0) continue;
      out(k, l) += score_of[static_cast<std::size_t>(it.row())] * it.value() *
                   score_of[static_cast<std::size_t>(col)];
    }
  }
  return out;
}

std::vector<Index> SelectOutput::supernode_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(k_), 0);
  if (kind_ == SelectionKind::Dense) {
    for (Index k = 0; k < k_; ++k)
      sizes[static_cast<std::size_t>(k)] = (dense_.col(k).array() > 0.0).count();
  } else {
    for (std::size_t t = 0; t < nodes_.size(); ++t)
      if (scores_[static_cast<Index>(t)] > 0.0) ++sizes[static_cast<std::size_t>(supernodes_[t])];
  }
  return sizes;
}

Graph PooledGraph::to_graph(double threshold) const { return graph_from_adjacency(a, x, std::nullopt, threshold); }

bool OperatorDescriptor::is_global() const noexcept {
  const auto* fixed_k = std::get_if<FixedK>(&k_policy);
  return fixed && fixed_k != nullptr && fixed_k->k == 1;
}

std::optional<Index> resolve_k(const KPolicy& policy, Index n) {
  if (const auto* f = std::get_if<FixedK>(&policy)) return f->k;
  if (const auto* r = std::get_if<RatioK>(&policy)) {
    const auto k = static_cast<Index>(std::ceil(r->ratio * static_cast<double>(n) - 1e-9));
    return std::clamp<Index>(k, 1, std::max<Index>(n, 1));
  }
  return std::nullopt;
}

OperatorDescriptor IdentityPooling::descriptor() const {
  return {.trainable = false, .dense = false, .fixed = false, .hierarchical = true,
          .k_policy = RatioK{1.0}};
}

SelectOutput IdentityPooling::select(const Graph& g) const {
  std::vector<Index> nodes(static_cast<std::size_t>(g.num_nodes()));
  for (Index i = 0; i < g.num_nodes(); ++i) nodes[static_cast<std::size_t>(i)] = i;
  return SelectOutput::from_indices(g.num_nodes(), std::move(nodes));
}

Matrix IdentityPooling::reduce(const Graph& g, const SelectOutput& sel) const {
  return sel.transpose_times(g.features());
}

Matrix IdentityPooling::connect(const Graph& g, const SelectOutput& sel) const {
  return sel.contract(g.sparse_adjacency());
}

PooledGraph pool(const Graph& g, const PoolingOperator& op) {
  const OperatorDescriptor desc = op.descriptor();
  if (desc.fixed) {
    if (const auto k = resolve_k(desc.k_policy, g.num_nodes()); k && *k > g.num_nodes()) {
      warn(op.id() + ": fixed K=" + std::to_string(*k) + " exceeds N=" +
           std::to_string(g.num_nodes()) + ", the graph is upscaled");
    }
  }

  PooledGraph out;
  out.operator_id = op.id();
  out.selection = op.select(g);
  const Index k = out.selection.num_supernodes();
  if (out.selection.num_nodes() != g.num_nodes())
    throw PoolingError(op.id() + ": selection row count differs from N");

  out.x = op.reduce(g, out.selection);
  if (out.x.rows() != k) throw PoolingError(op.id() + ": reduce returned wrong row count");

  if (desc.is_global()) {
    out.a = Matrix::Zero(k, k);
    return out;
  }
  out.a = op.connect(g, out.selection);
  if (out.a.rows() != k || out.a.cols() != k)
    throw PoolingError(op.id() + ": connect returned wrong shape");
  out.a.diagonal().setZero();
  // Connect outputs are symmetric up to roundoff; make it exact.
  out.a = 0.5 * (out.a + out.a.transpose()).eval();
  return out;
}

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warning_mutex());
  return std::exchange(warning_handler(), std::move(handler));
}

void warn(std::string_view message) {
  std::lock_guard lock(warning_mutex());
  if (warning_handler()) warning_handler()(message);
}

double density_of(const SelectOutput& sel, Index n) {
  if (n < 1) throw PoolingError("density_of: n must be positive");
  const auto sizes = sel.supernode_sizes();
  if (sizes.empty()) throw PoolingError("density_of: selection has no supernodes");
  double total = 0.0;
  for (Index s : sizes) total += static_cast<double>(s) / static_cast<double>(n);
  return total / static_cast<double>(sizes.size());
}

Index storage_count(const SelectOutput& sel) {
  if (sel.kind() == SelectionKind::Dense) return sel.num_nodes() * sel.num_supernodes();
  return static_cast<Index>(sel.nodes().size());
}

}  // namespace srcpool
