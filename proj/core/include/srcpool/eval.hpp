#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srcpool/pooling.hpp"
#include "srcpool/registry.hpp"
#include "srcpool/training.hpp"

namespace srcpool {

/// Mean squared distance between adjacent positions, per coordinate:
/// sum over directed edges of ||x_i - x_j||^2 / (2 |E| d).
double gamma_baseline(const Graph& g);

/// First `num_eigenvectors` eigenvectors of the combinatorial Laplacian next
/// to the node positions, every column scaled to unit l2 norm.
Matrix signal_matrix(const Graph& g, Index num_eigenvectors = 10);

struct QuadraticLoss {
  double value = 0.0;  ///< mean over columns
  Vector per_column;   ///< |x^T L x - x'^T L' x'|
};

/// Compares the quadratic forms of the graph features on G with those of the
/// pooled features on G'.
QuadraticLoss quadratic_loss(const Graph& g, const PooledGraph& pooled);

struct StructureStats {
  double edge_density = 0.0;  ///< nonzero off-diagonal entries / K^2
  double median_weight = 0.0;
  Index num_edges = 0;  ///< undirected
};

/// Entries at most 1e-12 times the largest weight count as absent.
StructureStats structure_stats(const Matrix& adjacency);

struct SpectrumAlignment {
  Vector eig_before;
  Vector eig_after;
  Vector index_before;  ///< eigenvalue positions rescaled to [0, 1]
  Vector index_after;
};

/// Normalised-Laplacian spectra of G and G'.
SpectrumAlignment spectrum_alignment(const Graph& g, const PooledGraph& pooled);

struct ReconstructionOutcome {
  double mse = 0.0;
  double gamma = 0.0;
  PooledGraph pooled;
  std::optional<TrainResult> training;
};

/// Pools the positions of `g`, lifts them back and reports the MSE of the
/// least-squares decoded positions. Trainable operators are first trained on
/// that loss.
ReconstructionOutcome reconstruct(const Graph& g, PoolingOperator& op, const TrainConfig& cfg);
double reconstruct_mse(const Graph& g, PoolingOperator& op, const TrainConfig& cfg);

/// Training defaults of the two experiments.
TrainConfig spectral_train_defaults();
TrainConfig reconstruction_train_defaults();

struct StorageRow {
  Index n = 0;
  Index k = 0;
  Index storage = 0;
};

struct StorageProbe {
  std::string operator_id;
  std::vector<StorageRow> rows;
  std::optional<double> slope;  ///< least-squares slope of log storage vs log N
};

/// Selection storage of an operator on Erdos-Renyi graphs of the given sizes.
StorageProbe storage_probe(std::string_view op_id, std::span<const Index> sizes, double p,
                           std::uint64_t seed, const OperatorConfig& op_cfg = {},
                           Index feature_dim = 4);

/// Least-squares slope of log(y) against log(x); needs two distinct x.
std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y);

enum class Experiment { Autoencoder, Spectral };

struct ExperimentReport {
  std::string graph_name;
  std::string operator_id;
  Experiment experiment = Experiment::Spectral;
  std::string status = "ok";  ///< "ok" or "failed: <reason>"
  Index k = 0;
  std::optional<double> mse;
  std::optional<double> gamma;
  std::optional<double> quad_loss;
  std::optional<double> edge_density;
  std::optional<double> median_weight;
  Vector eig_before;
  Vector eig_after;
  Index storage = 0;
  int epochs = 0;
  std::int64_t wall_time_ms = 0;
  std::vector<double> loss_curve;

  bool ok() const noexcept { return status == "ok"; }
  bool mse_exceeds_gamma() const noexcept { return mse && gamma && *mse > *gamma; }
};

struct ExperimentJob {
  std::string graph_name;
  Graph graph;
  std::string operator_id;
  OperatorConfig op;
  TrainConfig train;
  Experiment experiment = Experiment::Spectral;
};

/// Runs one job. Any exception and the training time limit are reported
/// through the status field instead of being thrown.
ExperimentReport run_experiment(const ExperimentJob& job);

/// Runs jobs on `workers` threads; reports come back in job order.
std::vector<ExperimentReport> run_sweep(std::span<const ExperimentJob> jobs, int workers = 1);

/// Per-run wall-clock budget applied to training.
inline constexpr double kRunTimeLimitSeconds = 600.0;

}  // namespace srcpool
