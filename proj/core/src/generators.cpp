#include "srcpool/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "srcpool/rng.hpp"

namespace srcpool {

Graph build_grid2d(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw GraphError("grid2d needs rows, cols >= 1");
  const Index n = rows * cols;
  const double spacing = 1.0 / static_cast<double>(std::max(rows, cols));
  Matrix coords(n, 2);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(2 * n));
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const Index u = r * cols + c;
      coords(u, 0) = static_cast<double>(c) * spacing;
      coords(u, 1) = static_cast<double>(r) * spacing;
      if (c + 1 < cols) edges.push_back({u, u + 1, 1.0});
      if (r + 1 < rows) edges.push_back({u, u + cols, 1.0});
    }
  }
  return Graph(n, std::move(edges), coords, coords);
}

Graph build_ring(Index n) {
  if (n < 3) throw GraphError("ring needs at least 3 nodes, got " + std::to_string(n));
  Matrix coords(n, 2);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    coords(k, 0) = std::cos(angle);
    coords(k, 1) = std::sin(angle);
    edges.push_back({k, (k + 1) % n, 1.0});
  }
  return Graph(n, std::move(edges), coords, coords);
}

namespace {

constexpr double kSensorThreshold = 0.6;
constexpr int kSensorStrongestLinks = 2;
constexpr int kSensorMaxTries = 100;

Matrix sensor_weights(const Matrix& points) {
  const Index n = points.rows();
  const double cutoff = 2.0 / std::sqrt(static_cast<double>(n));
  const double width2 = -cutoff * cutoff / (2.0 * std::log(kSensorThreshold));
  Matrix w(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      w(i, j) = i == j ? 0.0 : std::exp(-(points.row(i) - points.row(j)).squaredNorm() / (2.0 * width2));
    }
  }

  // Each node's strongest links, symmetrised by averaging.
  Matrix strongest = Matrix::Zero(n, n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return w(i, a) > w(i, b); });
    const Index keep = std::min<Index>(kSensorStrongestLinks, n - 1);
    for (Index t = 0; t < keep; ++t) strongest(i, order[t]) = w(i, order[t]);
  }
  strongest = 0.5 * (strongest + strongest.transpose()).eval();

  Matrix out = (w.array() >= kSensorThreshold).select(w, 0.0);
  return (strongest.array() > 0.0).select(strongest, out);
}

}  // namespace

Graph build_sensor(Index n, std::uint64_t seed) {
  if (n < 2) throw GraphError("sensor needs at least 2 nodes");
  Rng rng(seed);
  for (int attempt = 0; attempt < kSensorMaxTries; ++attempt) {
    Matrix points(n, 2);
    for (Index i = 0; i < n; ++i) {
      points(i, 0) = rng.uniform();
      points(i, 1) = rng.uniform();
    }
    Graph g = graph_from_adjacency(sensor_weights(points), points, points);
    const auto labels = connected_components(g);
    if (std::all_of(labels.begin(), labels.end(), [](Index l) { return l == 0; })) return g;
  }
  throw GraphError("sensor graph not connected after " + std::to_string(kSensorMaxTries) +
                   " draws");
}

Graph build_erdos_renyi(Index n, double p, std::uint64_t seed, Index feature_dim) {
  if (n < 1) throw GraphError("erdos_renyi needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw GraphError("edge probability must lie in [0, 1]");
  if (feature_dim < 1) throw GraphError("feature_dim must be >= 1");
  Rng rng(seed);
  std::vector<Edge> edges;
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  edges.reserve(static_cast<std::size_t>(p * pairs * 1.05) + 16);

  if (p >= 1.0) {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  } else if (p > 0.0) {
    // Geometric skipping over the linearised pairs (i, j), i < j, row-major.
    const double log_q = std::log1p(-p);
    const auto total = static_cast<std::int64_t>(n) * (n - 1) / 2;
    std::int64_t t = -1;
    std::int64_t row_start = 0;
    Index i = 0;
    for (;;) {
      const double skip = std::floor(std::log1p(-rng.uniform()) / log_q);
      if (skip >= static_cast<double>(total)) break;
      t += static_cast<std::int64_t>(skip) + 1;
      if (t >= total) break;
      while (t >= row_start + (n - 1 - i)) {
        row_start += n - 1 - i;
        ++i;
      }
      edges.push_back({i, i + 1 + static_cast<Index>(t - row_start), 1.0});
    }
  }

  Matrix features(n, feature_dim);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < feature_dim; ++c) features(r, c) = rng.normal();
  return Graph(n, std::move(edges), std::move(features));
}

}  // namespace srcpool
