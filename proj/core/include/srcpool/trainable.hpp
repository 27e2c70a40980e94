#pragma once

#include <string>
#include <vector>

#include "srcpool/nn.hpp"
#include "srcpool/pooling.hpp"

namespace srcpool {

struct AuxLoss {
  std::string name;
  double value = 0.0;
};

/// Everything one forward pass produces, including intermediates needed by
/// the backward pass. a_pooled keeps the raw diagonal of the connect step;
/// Laplacians built from it ignore the diagonal.
struct TrainableForward {
  SelectOutput selection;
  Matrix x_pooled;
  Matrix a_pooled;
  std::vector<AuxLoss> aux;
  std::vector<Matrix> cache;

  double aux_total() const {
    double total = 0.0;
    for (const auto& a : aux) total += a.value;
    return total;
  }
};

/// Gradient of a scalar loss w.r.t. the outputs of a forward pass. Empty
/// matrices stand for zero. d_selection is taken w.r.t. the gated selection
/// matrix (gate * S) and is only consulted by losses that use the lift.
struct PooledGrad {
  Matrix d_x_pooled;
  Matrix d_a_pooled;
  Matrix d_selection;
  /// Weight of the operator's auxiliary losses in the total loss.
  double aux_weight = 0.0;
};

/// Pooling operator with parameters and a hand-written backward pass.
class TrainablePooling : public PoolingOperator {
 public:
  virtual ParamSet& params() = 0;
  virtual const ParamSet& params() const = 0;

  virtual TrainableForward forward(const Graph& g) const = 0;
  virtual ParamSet backward(const Graph& g, const TrainableForward& fwd,
                            const PooledGrad& grad) const = 0;
};

}  // namespace srcpool
