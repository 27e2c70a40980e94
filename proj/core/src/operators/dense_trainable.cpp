#include "srcpool/operators/dense_trainable.hpp"

#include <cmath>

#include "srcpool/rng.hpp"

namespace srcpool {

namespace {

// d/dS of f(S^T A S) given G = df/dA' (A symmetric).
Matrix contraction_grad(const SparseMatrix& a, const Matrix& s, const Matrix& g) {
  return a * (s * (g + g.transpose()));
}

Matrix or_zero(const Matrix& m, Index rows, Index cols) {
  return m.size() == 0 ? Matrix::Zero(rows, cols) : m;
}

}  // namespace

// ---------------------------------------------------------------- MinCut

MinCutPooling::MinCutPooling(Index in_features, MinCutConfig cfg) : cfg_(cfg) {
  if (cfg_.k < 1) throw PoolingError("mincut: k must be at least 1");
  if (cfg_.hidden < 1) throw PoolingError("mincut: hidden width must be at least 1");
  params_.add("w1", glorot_uniform(in_features, cfg_.hidden, derive_seed(cfg_.seed, 0)));
  params_.add("b1", Matrix::Zero(1, cfg_.hidden));
  params_.add("w2", glorot_uniform(cfg_.hidden, cfg_.k, derive_seed(cfg_.seed, 1)));
  params_.add("b2", Matrix::Zero(1, cfg_.k));
}

OperatorDescriptor MinCutPooling::descriptor() const {
  return {.trainable = true, .dense = true, .fixed = true, .hierarchical = cfg_.k != 1,
          .k_policy = FixedK{cfg_.k}};
}

Matrix MinCutPooling::assignment(const Graph& g, Matrix* hidden_pre) const {
  const Matrix& x = g.features();
  if (x.cols() != params_["w1"].rows()) throw PoolingError("mincut: feature width mismatch");
  Matrix z1 = x * params_["w1"];
  z1.rowwise() += params_["b1"].row(0);
  Matrix z2 = relu(z1) * params_["w2"];
  z2.rowwise() += params_["b2"].row(0);
  if (hidden_pre) *hidden_pre = std::move(z1);
  return softmax_rows(z2);
}

SelectOutput MinCutPooling::select(const Graph& g) const {
  return SelectOutput::dense(assignment(g, nullptr));
}

Matrix MinCutPooling::reduce(const Graph& g, const SelectOutput& sel) const {
  return sel.transpose_times(g.features());
}

Matrix MinCutPooling::connect(const Graph& g, const SelectOutput& sel) const {
  return sel.contract(g.sparse_adjacency());
}

TrainableForward MinCutPooling::forward(const Graph& g) const {
  Matrix z1;
  Matrix s = assignment(g, &z1);
  const SparseMatrix a = g.sparse_adjacency();
  const Vector deg = g.degrees();
  const Index k = s.cols();

  TrainableForward f;
  f.x_pooled = s.transpose() * g.features();
  f.a_pooled = s.transpose() * (a * s);

  const double num = f.a_pooled.trace();
  const double den = (s.array().square().colwise() * deg.array()).sum();
  const double cut = den > 0.0 ? -num / den : 0.0;
  const Matrix p = s.transpose() * s;
  const double pn = p.norm();
  const Matrix q = p / pn - Matrix::Identity(k, k) / std::sqrt(static_cast<double>(k));
  f.aux = {{"cut", cut}, {"ortho", q.norm()}};

  f.cache = {std::move(z1), s};
  f.selection = SelectOutput::dense(std::move(s));
  return f;
}

ParamSet MinCutPooling::backward(const Graph& g, const TrainableForward& fwd,
                                 const PooledGrad& grad) const {
  const Matrix& x = g.features();
  const Matrix& z1 = fwd.cache[0];
  const Matrix& s = fwd.cache[1];
  const Index n = s.rows();
  const Index k = s.cols();
  const SparseMatrix a = g.sparse_adjacency();

  Matrix d_s = or_zero(grad.d_selection, n, k);
  if (grad.d_x_pooled.size() > 0) d_s += x * grad.d_x_pooled.transpose();
  if (grad.d_a_pooled.size() > 0) d_s += contraction_grad(a, s, grad.d_a_pooled);

  if (grad.aux_weight != 0.0) {
    const Vector deg = g.degrees();
    const Matrix as = a * s;
    const double num = (s.transpose() * as).trace();
    const double den = (s.array().square().colwise() * deg.array()).sum();
    if (den > 0.0) {
      const Matrix ds_scaled = s.array().colwise() * deg.array();
      d_s += grad.aux_weight * (-2.0 * as / den + (2.0 * num / (den * den)) * ds_scaled);
    }
    const Matrix p = s.transpose() * s;
    const double pn = p.norm();
    const Matrix q = p / pn - Matrix::Identity(k, k) / std::sqrt(static_cast<double>(k));
    const double o = q.norm();
    if (o > 0.0 && pn > 0.0) {
      const Matrix gq = q / o;
      const Matrix dp = (gq - ((gq.array() * p.array()).sum() / (pn * pn)) * p) / pn;
      d_s += grad.aux_weight * (s * (dp + dp.transpose()));
    }
  }

  const Matrix d_z2 = softmax_rows_backward(s, d_s);
  const Matrix h = relu(z1);
  ParamSet out = params_.zeros_like();
  out["w2"] = h.transpose() * d_z2;
  out["b2"] = d_z2.colwise().sum();
  const Matrix d_z1 = (z1.array() > 0.0).select(d_z2 * params_["w2"].transpose(), 0.0);
  out["w1"] = x.transpose() * d_z1;
  out["b1"] = d_z1.colwise().sum();
  return out;
}

// -------------------------------------------------------------- DiffPool

DiffPoolPooling::DiffPoolPooling(Index in_features, DiffPoolConfig cfg) : cfg_(cfg) {
  if (cfg_.k < 1) throw PoolingError("diffpool: k must be at least 1");
  params_.add("w_assign", glorot_uniform(in_features, cfg_.k, derive_seed(cfg_.seed, 0)));
  params_.add("w_embed", glorot_uniform(in_features, in_features, derive_seed(cfg_.seed, 1)));
}

OperatorDescriptor DiffPoolPooling::descriptor() const {
  return {.trainable = true, .dense = true, .fixed = true, .hierarchical = cfg_.k != 1,
          .k_policy = FixedK{cfg_.k}};
}

SelectOutput DiffPoolPooling::select(const Graph& g) const {
  if (g.num_features() != params_["w_assign"].rows())
    throw PoolingError("diffpool: feature width mismatch");
  return SelectOutput::dense(softmax_rows(propagate(g, g.features(), params_["w_assign"])));
}

Matrix DiffPoolPooling::reduce(const Graph& g, const SelectOutput& sel) const {
  return sel.transpose_times(propagate(g, g.features(), params_["w_embed"]));
}

Matrix DiffPoolPooling::connect(const Graph& g, const SelectOutput& sel) const {
  return sel.contract(g.sparse_adjacency());
}

TrainableForward DiffPoolPooling::forward(const Graph& g) const {
  if (g.num_features() != params_["w_assign"].rows())
    throw PoolingError("diffpool: feature width mismatch");
  const SparseMatrix prop = propagation_matrix(g);
  Matrix px = prop * g.features();
  Matrix h1 = relu(px * params_["w_assign"]);
  Matrix s = softmax_rows(h1);
  Matrix e = relu(px * params_["w_embed"]);
  const SparseMatrix a = g.sparse_adjacency();
  const auto n = static_cast<double>(g.num_nodes());

  TrainableForward f;
  f.x_pooled = s.transpose() * e;
  f.a_pooled = s.transpose() * (a * s);

  const Matrix resid = Matrix(a) - s * s.transpose();
  const double link = resid.norm() / (n * n);
  const double entropy = -(s.array() * s.array().max(1e-300).log()).sum() / n;
  f.aux = {{"link", link}, {"entropy", entropy}};

  f.cache = {std::move(px), std::move(h1), s, std::move(e)};
  f.selection = SelectOutput::dense(std::move(s));
  return f;
}

ParamSet DiffPoolPooling::backward(const Graph& g, const TrainableForward& fwd,
                                   const PooledGrad& grad) const {
  const Matrix& px = fwd.cache[0];
  const Matrix& h1 = fwd.cache[1];
  const Matrix& s = fwd.cache[2];
  const Matrix& e = fwd.cache[3];
  const Index n = s.rows();
  const Index k = s.cols();
  const SparseMatrix a = g.sparse_adjacency();

  Matrix d_s = or_zero(grad.d_selection, n, k);
  Matrix d_e = Matrix::Zero(e.rows(), e.cols());
  if (grad.d_x_pooled.size() > 0) {
    d_s += e * grad.d_x_pooled.transpose();
    d_e = s * grad.d_x_pooled;
  }
  if (grad.d_a_pooled.size() > 0) d_s += contraction_grad(a, s, grad.d_a_pooled);

  if (grad.aux_weight != 0.0) {
    const auto nn = static_cast<double>(n);
    const Matrix resid = Matrix(a) - s * s.transpose();
    const double r = resid.norm();
    if (r > 0.0) d_s += grad.aux_weight * (-2.0 / (r * nn * nn)) * (resid * s);
    d_s += grad.aux_weight * (-(s.array().max(1e-300).log() + 1.0) / nn).matrix();
  }

  ParamSet out = params_.zeros_like();
  out["w_assign"] = propagate_weight_grad(px, h1, softmax_rows_backward(s, d_s));
  out["w_embed"] = propagate_weight_grad(px, e, d_e);
  return out;
}

}  // namespace srcpool
