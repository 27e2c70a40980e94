#include "srcpool/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "srcpool/generators.hpp"
#include "srcpool/linalg.hpp"
#include "srcpool/objectives.hpp"
#include "srcpool/rng.hpp"

namespace srcpool {

double gamma_baseline(const Graph& g) {
  if (g.num_edges() == 0) throw std::invalid_argument("gamma_baseline: graph has no edges");
  const Matrix& x = g.positions();
  double total = 0.0;
  for (const Edge& e : g.edges()) total += (x.row(e.i) - x.row(e.j)).squaredNorm();
  // Each undirected edge contributes twice to the sum and to the edge count.
  return total / (static_cast<double>(g.num_edges()) * static_cast<double>(x.cols()));
}

Matrix signal_matrix(const Graph& g, Index num_eigenvectors) {
  const Index m = std::min(num_eigenvectors, g.num_nodes());
  const Matrix vecs = eigh_range(laplacian(g), EigenRange::smallest(m)).vectors;
  const Matrix& pos = g.positions();
  Matrix x(g.num_nodes(), m + pos.cols());
  x << vecs, pos;
  for (Index c = 0; c < x.cols(); ++c) {
    const double norm = x.col(c).norm();
    if (norm > 0.0) x.col(c) /= norm;
  }
  return x;
}

QuadraticLoss quadratic_loss(const Graph& g, const PooledGraph& pooled) {
  if (pooled.x.cols() != g.num_features())
    throw std::invalid_argument("quadratic_loss: pooled features do not match the signal width");
  const Vector q = quadratic_forms(g.dense_adjacency(), g.features());
  const Vector qp = quadratic_forms(pooled.a, pooled.x);
  QuadraticLoss out;
  out.per_column = (q - qp).cwiseAbs();
  out.value = out.per_column.size() > 0 ? out.per_column.mean() : 0.0;
  return out;
}

StructureStats structure_stats(const Matrix& adjacency) {
  const Index k = adjacency.rows();
  StructureStats out;
  if (k == 0) return out;
  Matrix off = adjacency;
  off.diagonal().setZero();
  const double max_w = off.cwiseAbs().maxCoeff();
  const double cutoff = 1e-12 * max_w;
  std::vector<double> weights;
  for (Index j = 0; j < k; ++j)
    for (Index i = j + 1; i < k; ++i)
      if (std::abs(off(i, j)) > cutoff && max_w > 0.0) weights.push_back(off(i, j));
  out.num_edges = static_cast<Index>(weights.size());
  out.edge_density = 2.0 * static_cast<double>(weights.size()) / static_cast<double>(k * k);
  if (!weights.empty()) {
    std::sort(weights.begin(), weights.end());
    const std::size_t mid = weights.size() / 2;
    out.median_weight = weights.size() % 2 == 1 ? weights[mid] : 0.5 * (weights[mid - 1] + weights[mid]);
  }
  return out;
}

namespace {

Vector rescaled_index(Index n) {
  if (n <= 1) return Vector::Zero(n);
  return Vector::LinSpaced(n, 0.0, 1.0);
}

}  // namespace

SpectrumAlignment spectrum_alignment(const Graph& g, const PooledGraph& pooled) {
  SpectrumAlignment out;
  out.eig_before = eigvalsh(laplacian(g, LaplacianKind::SymNormalized));
  out.eig_after = eigvalsh(laplacian_from_adjacency(pooled.a, LaplacianKind::SymNormalized));
  out.index_before = rescaled_index(out.eig_before.size());
  out.index_after = rescaled_index(out.eig_after.size());
  return out;
}

TrainConfig spectral_train_defaults() {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 5000;
  cfg.patience = 50;
  cfg.tol = 1e-6;
  cfg.loss = LossKind::Spectral;
  cfg.include_aux = true;
  cfg.time_limit_s = kRunTimeLimitSeconds;
  return cfg;
}

TrainConfig reconstruction_train_defaults() {
  TrainConfig cfg;
  cfg.learning_rate = 0.0005;
  cfg.max_epochs = 10000;
  cfg.patience = 1000;
  cfg.tol = 1e-6;
  cfg.loss = LossKind::Reconstruction;
  cfg.include_aux = true;
  cfg.time_limit_s = kRunTimeLimitSeconds;
  return cfg;
}

ReconstructionOutcome reconstruct(const Graph& g, PoolingOperator& op, const TrainConfig& cfg) {
  const Graph gp = g.with_features(g.positions());
  ReconstructionOutcome out;
  out.gamma = gamma_baseline(gp);
  if (auto* trainable = dynamic_cast<TrainablePooling*>(&op)) {
    TrainConfig tc = cfg;
    tc.loss = LossKind::Reconstruction;
    out.training = train(*trainable, gp, tc);
  }
  out.pooled = pool(gp, op);
  out.mse = lift_reconstruct(gp, gp.features(), out.pooled.selection.gated_matrix(), out.pooled.x,
                             false)
                .mse;
  return out;
}

double reconstruct_mse(const Graph& g, PoolingOperator& op, const TrainConfig& cfg) {
  return reconstruct(g, op, cfg).mse;
}

std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

StorageProbe storage_probe(std::string_view op_id, std::span<const Index> sizes, double p,
                           std::uint64_t seed, const OperatorConfig& op_cfg, Index feature_dim) {
  StorageProbe out;
  out.operator_id = std::string(op_id);
  std::vector<double> xs, ys;
  for (Index n : sizes) {
    const Graph g = build_erdos_renyi(n, p, derive_seed(seed, static_cast<std::uint64_t>(n)), feature_dim);
    const auto op = make_operator(op_id, op_cfg, {n, feature_dim});
    const SelectOutput sel = op->select(g);
    const Index storage = storage_count(sel);
    out.rows.push_back({n, sel.num_supernodes(), storage});
    xs.push_back(static_cast<double>(n));
    ys.push_back(static_cast<double>(storage));
  }
  out.slope = loglog_slope(xs, ys);
  return out;
}

namespace {

void run_spectral(const ExperimentJob& job, ExperimentReport& rep) {
  const Graph g = job.graph.with_features(signal_matrix(job.graph));
  const auto op = make_operator(job.operator_id, job.op, {g.num_nodes(), g.num_features()});
  rep.gamma = gamma_baseline(job.graph);
  if (auto* trainable = dynamic_cast<TrainablePooling*>(op.get())) {
    TrainConfig tc = job.train;
    tc.loss = LossKind::Spectral;
    const TrainResult tr = train(*trainable, g, tc);
    rep.loss_curve = tr.loss_curve;
    rep.epochs = static_cast<int>(tr.loss_curve.size());
    if (tr.reason == StopReason::TimeLimit) throw PoolingError("timeout");
  }
  const PooledGraph pooled = pool(g, *op);
  rep.k = pooled.num_supernodes();
  rep.storage = storage_count(pooled.selection);
  rep.quad_loss = quadratic_loss(g, pooled).value;
  const StructureStats stats = structure_stats(pooled.a);
  rep.edge_density = stats.edge_density;
  rep.median_weight = stats.median_weight;
  const SpectrumAlignment spec = spectrum_alignment(g, pooled);
  rep.eig_before = spec.eig_before;
  rep.eig_after = spec.eig_after;
}

void run_autoencoder(const ExperimentJob& job, ExperimentReport& rep) {
  const Graph& g = job.graph;
  const auto op = make_operator(job.operator_id, job.op, {g.num_nodes(), g.positions().cols()});
  const ReconstructionOutcome res = reconstruct(g, *op, job.train);
  if (res.training) {
    rep.loss_curve = res.training->loss_curve;
    rep.epochs = static_cast<int>(res.training->loss_curve.size());
    if (res.training->reason == StopReason::TimeLimit) throw PoolingError("timeout");
  }
  rep.k = res.pooled.num_supernodes();
  rep.storage = storage_count(res.pooled.selection);
  rep.mse = res.mse;
  rep.gamma = res.gamma;
  const StructureStats stats = structure_stats(res.pooled.a);
  rep.edge_density = stats.edge_density;
  rep.median_weight = stats.median_weight;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentJob& job) {
  ExperimentReport rep;
  rep.graph_name = job.graph_name;
  rep.operator_id = job.operator_id;
  rep.experiment = job.experiment;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (job.experiment == Experiment::Spectral) run_spectral(job, rep);
    else run_autoencoder(job, rep);
  } catch (const std::exception& e) {
    ExperimentReport failed;
    failed.graph_name = rep.graph_name;
    failed.operator_id = rep.operator_id;
    failed.experiment = rep.experiment;
    failed.status = std::string("failed: ") + e.what();
    rep = std::move(failed);
  }
  rep.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return rep;
}

std::vector<ExperimentReport> run_sweep(std::span<const ExperimentJob> jobs, int workers) {
  std::vector<ExperimentReport> reports(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        reports[i] = run_experiment(jobs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::clamp<int>(workers, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1))));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return reports;
}

}  // namespace srcpool
