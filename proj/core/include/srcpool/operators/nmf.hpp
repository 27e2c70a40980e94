#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srcpool/pooling.hpp"

namespace srcpool {

struct NmfConfig {
  Index rank = 1;
  /// When set, the rank is ceil(ratio * N) for each input graph instead.
  std::optional<double> ratio;
  int max_iters = 500;
  /// Stop when the relative objective change drops below tol.
  double tol = 1e-5;
  std::uint64_t seed = 42;
};

struct NmfResult {
  Matrix w;  ///< N x K
  Matrix h;  ///< K x N
  /// ||A - WH||_F^2 after initialisation and after every iteration.
  std::vector<double> objective;
  bool converged = false;
};

/// Multiplicative-update factorisation A ~ WH of a nonnegative matrix.
NmfResult nmf_factorize(const Matrix& a, const NmfConfig& cfg);

/// Pools with S = H^T from a rank-K factorisation of the adjacency.
class NmfPooling final : public PoolingOperator {
 public:
  explicit NmfPooling(NmfConfig cfg) : cfg_(cfg) {}

  std::string id() const override { return "nmf"; }
  OperatorDescriptor descriptor() const override;
  SelectOutput select(const Graph& g) const override;
  Matrix reduce(const Graph& g, const SelectOutput& sel) const override;
  Matrix connect(const Graph& g, const SelectOutput& sel) const override;

  const NmfConfig& config() const noexcept { return cfg_; }

 private:
  NmfConfig cfg_;
};

}  // namespace srcpool
