#include "srcpool/operators/topk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srcpool/rng.hpp"

namespace srcpool {

std::vector<Index> top_k_indices(const Vector& scores, Index k) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  k = std::clamp<Index>(k, 0, scores.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores[a] > scores[b]; });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

double gate_value(GateKind kind, double y) {
  return kind == GateKind::Tanh ? std::tanh(y) : 1.0 / (1.0 + std::exp(-y));
}

double gate_derivative(GateKind kind, double y) {
  const double g = gate_value(kind, y);
  return kind == GateKind::Tanh ? 1.0 - g * g : g * (1.0 - g);
}

ScoreSubsamplingPooling::ScoreSubsamplingPooling(TopKConfig cfg) : cfg_(cfg) {
  if (!(cfg_.ratio > 0.0 && cfg_.ratio <= 1.0)) throw PoolingError("ratio must lie in (0, 1]");
}

OperatorDescriptor ScoreSubsamplingPooling::descriptor() const {
  return {.trainable = true, .dense = false, .fixed = false, .hierarchical = true,
          .k_policy = RatioK{cfg_.ratio}};
}

SelectOutput ScoreSubsamplingPooling::select(const Graph& g) const {
  const Vector y = scores(g);
  const Index k = *resolve_k(RatioK{cfg_.ratio}, g.num_nodes());
  auto keep = top_k_indices(y, k);
  Vector gate(static_cast<Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r)
    gate[static_cast<Index>(r)] = gate_value(cfg_.gate, y[keep[r]]);
  return SelectOutput::from_indices(g.num_nodes(), std::move(keep), std::move(gate));
}

Matrix ScoreSubsamplingPooling::reduce(const Graph& g, const SelectOutput& sel) const {
  const auto nodes = sel.nodes();
  Matrix x(static_cast<Index>(nodes.size()), g.num_features());
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const auto ri = static_cast<Index>(r);
    const double gate = sel.gate() ? (*sel.gate())[ri] : 1.0;
    x.row(ri) = gate * g.features().row(nodes[r]);
  }
  return x;
}

Matrix ScoreSubsamplingPooling::connect(const Graph& g, const SelectOutput& sel) const {
  const std::vector<Index> nodes(sel.nodes().begin(), sel.nodes().end());
  return g.dense_adjacency()(nodes, nodes);
}

TrainableForward ScoreSubsamplingPooling::forward(const Graph& g) const {
  TrainableForward f;
  f.selection = select(g);
  f.x_pooled = reduce(g, f.selection);
  f.a_pooled = connect(g, f.selection);
  f.cache = {scores(g)};
  return f;
}

ParamSet ScoreSubsamplingPooling::backward(const Graph& g, const TrainableForward& fwd,
                                           const PooledGrad& grad) const {
  const Vector& y = fwd.cache[0];
  const auto nodes = fwd.selection.nodes();
  Vector d_y = Vector::Zero(y.size());
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const auto ri = static_cast<Index>(r);
    const Index i = nodes[r];
    double d_gate = 0.0;
    if (grad.d_x_pooled.size() > 0) d_gate += grad.d_x_pooled.row(ri).dot(g.features().row(i));
    if (grad.d_selection.size() > 0) d_gate += grad.d_selection(i, ri);
    d_y[i] = d_gate * gate_derivative(cfg_.gate, y[i]);
  }
  return score_backward(g, d_y);
}

TopKPooling::TopKPooling(Index in_features, TopKConfig cfg) : ScoreSubsamplingPooling(cfg) {
  params_.add("p", glorot_uniform(in_features, 1, derive_seed(cfg.seed, 0)));
}

Vector TopKPooling::scores(const Graph& g) const {
  const Matrix& p = params_["p"];
  if (g.num_features() != p.rows()) throw PoolingError("topk: feature width mismatch");
  const double norm = p.norm();
  if (!(norm > 0.0)) throw PoolingError("topk: projection vector has zero norm");
  return g.features() * p.col(0) / norm;
}

ParamSet TopKPooling::score_backward(const Graph& g, const Vector& d_scores) const {
  const Vector p = params_["p"].col(0);
  const double norm = p.norm();
  const Vector xt_dy = g.features().transpose() * d_scores;
  ParamSet out = params_.zeros_like();
  out["p"] = xt_dy / norm - p * (p.dot(xt_dy) / (norm * norm * norm));
  return out;
}

SagPooling::SagPooling(Index in_features, TopKConfig cfg) : ScoreSubsamplingPooling(cfg) {
  params_.add("w", glorot_uniform(in_features, 1, derive_seed(cfg.seed, 0)));
  params_.add("b", Matrix::Zero(1, 1));
}

Vector SagPooling::scores(const Graph& g) const {
  if (g.num_features() != params_["w"].rows()) throw PoolingError("sagpool: feature width mismatch");
  const Vector y = propagate(g, g.features(), params_["w"], Activation::Identity).col(0);
  return y.array() + params_["b"](0, 0);
}

ParamSet SagPooling::score_backward(const Graph& g, const Vector& d_scores) const {
  const Matrix px = propagation_matrix(g) * g.features();
  ParamSet out = params_.zeros_like();
  out["w"] = px.transpose() * d_scores;
  out["b"](0, 0) = d_scores.sum();
  return out;
}

}  // namespace srcpool
