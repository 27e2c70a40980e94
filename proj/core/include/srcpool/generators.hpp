#pragma once

#include <cstdint>

#include "srcpool/graph.hpp"

namespace srcpool {

/// 4-neighbour lattice with unit weights. Node (r, c) has index r * cols + c and
/// coordinates (c, r) / max(rows, cols); coordinates double as features (F = 2).
Graph build_grid2d(Index rows, Index cols);

/// Cycle on n >= 3 nodes with unit weights, coordinates on the unit circle.
Graph build_ring(Index n);

/// Random geometric sensor network on n >= 2 points in the unit square.
///
/// Weights follow a Gaussian kernel exp(-d^2 / 2s^2) whose width puts weight
/// 0.6 at distance 2 / sqrt(n). Pairs with weight >= 0.6 are linked and every
/// node additionally keeps its two strongest links (symmetrised by averaging).
/// Point sets that yield a disconnected graph are redrawn, up to 100 times.
Graph build_sensor(Index n, std::uint64_t seed);

/// G(n, p) with unit weights and standard-normal node features.
Graph build_erdos_renyi(Index n, double p, std::uint64_t seed, Index feature_dim = 1);

}  // namespace srcpool
