#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "srcpool/pooling.hpp"

namespace srcpool {

/// Operator construction parameters. `args` carries operator-specific
/// hyperparameters as strings (e.g. "gate" -> "sigmoid").
struct OperatorConfig {
  /// Supernode count for fixed operators (and NMF's rank); defaults to
  /// ceil(ratio * N).
  std::optional<Index> k;
  double ratio = 0.5;
  std::uint64_t seed = 42;
  std::map<std::string, std::string> args;
};

/// Input dimensions an operator is built for.
struct GraphShape {
  Index num_nodes = 0;
  Index num_features = 0;
};

/// The eight operator ids in a fixed order.
std::span<const std::string_view> operator_ids();

/// Reference taxonomy flags for an operator id (default configuration).
/// Throws std::invalid_argument for unknown ids.
OperatorDescriptor taxonomy(std::string_view id);

/// Builds an operator by id ("identity" is accepted as well). Unknown ids or
/// hyperparameters throw std::invalid_argument.
std::unique_ptr<PoolingOperator> make_operator(std::string_view id, const OperatorConfig& cfg,
                                               GraphShape shape);

}  // namespace srcpool
