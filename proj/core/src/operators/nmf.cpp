#include "srcpool/operators/nmf.hpp"

#include <cmath>

#include "srcpool/rng.hpp"

namespace srcpool {

namespace {

constexpr double kEps = 1e-16;

double objective(const Matrix& a, const Matrix& w, const Matrix& h) {
  return (a - w * h).squaredNorm();
}

}  // namespace

NmfResult nmf_factorize(const Matrix& a, const NmfConfig& cfg) {
  if (cfg.rank < 1) throw PoolingError("nmf: rank must be at least 1");
  if (a.rows() == 0) throw PoolingError("nmf: empty matrix");
  if (a.minCoeff() < 0.0) throw PoolingError("nmf: matrix must be nonnegative");
  const Index n = a.rows();
  const Index m = a.cols();
  const Index k = cfg.rank;

  const double scale = std::sqrt(std::max(a.mean(), kEps) / static_cast<double>(k));
  Rng rng(cfg.seed);
  NmfResult res;
  res.w.resize(n, k);
  res.h.resize(k, m);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i) res.w(i, j) = scale * std::abs(rng.normal());
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < k; ++i) res.h(i, j) = scale * std::abs(rng.normal());

  double prev = objective(a, res.w, res.h);
  res.objective.push_back(prev);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix wt = res.w.transpose();
    res.h.array() *= (wt * a).array() / ((wt * res.w) * res.h).array().max(kEps);
    const Matrix ht = res.h.transpose();
    res.w.array() *= (a * ht).array() / (res.w * (res.h * ht)).array().max(kEps);

    const double cur = objective(a, res.w, res.h);
    res.objective.push_back(cur);
    const double rel = std::abs(prev - cur) / std::max(prev, kEps);
    prev = cur;
    if (rel < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

OperatorDescriptor NmfPooling::descriptor() const {
  KPolicy policy = AutoK{};
  if (cfg_.ratio) policy = RatioK{*cfg_.ratio};
  else policy = FixedK{cfg_.rank};
  return {.trainable = false, .dense = true, .fixed = false, .hierarchical = true,
          .k_policy = policy};
}

SelectOutput NmfPooling::select(const Graph& g) const {
  NmfConfig cfg = cfg_;
  if (cfg.ratio) cfg.rank = *resolve_k(RatioK{*cfg.ratio}, g.num_nodes());
  return SelectOutput::dense(nmf_factorize(g.dense_adjacency(), cfg).h.transpose());
}

Matrix NmfPooling::reduce(const Graph& g, const SelectOutput& sel) const {
  return sel.transpose_times(g.features());
}

Matrix NmfPooling::connect(const Graph& g, const SelectOutput& sel) const {
  return sel.contract(g.sparse_adjacency());
}

}  // namespace srcpool
