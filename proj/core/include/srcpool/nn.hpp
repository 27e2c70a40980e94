#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "srcpool/graph.hpp"

namespace srcpool {

/// Named list of parameter matrices. Vectors are stored as 1 x d rows.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Matrix value;
  };

  void add(std::string name, Matrix value);

  Matrix& operator[](std::string_view name);
  const Matrix& operator[](std::string_view name) const;

  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<Entry>& entries() noexcept { return entries_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// Total number of scalars.
  Index num_scalars() const;
  Vector flatten() const;
  void assign(const Vector& flat);
  /// Same names and shapes, all zero.
  ParamSet zeros_like() const;
  bool all_finite() const;

 private:
  std::vector<Entry> entries_;
};

/// Glorot-uniform matrix drawn from `seed`.
Matrix glorot_uniform(Index rows, Index cols, std::uint64_t seed);

enum class Activation { Identity, Relu };

/// D^{-1/2} (A + I) D^{-1/2} with D the degrees of A + I.
SparseMatrix propagation_matrix(const Graph& g);

/// act(P X W) for a precomputed propagation matrix P.
Matrix propagate(const SparseMatrix& p, const Matrix& x, const Matrix& w,
                 Activation act = Activation::Relu);
Matrix propagate(const Graph& g, const Matrix& x, const Matrix& w,
                 Activation act = Activation::Relu);

/// Gradient of a scalar w.r.t. W given its gradient w.r.t. the output of
/// propagate. `px` is P X and `out` the forward output.
Matrix propagate_weight_grad(const Matrix& px, const Matrix& out, const Matrix& d_out,
                             Activation act = Activation::Relu);

Matrix softmax_rows(const Matrix& z);
/// Backward of row softmax: dZ = S * (dS - rowsum(dS * S)).
Matrix softmax_rows_backward(const Matrix& s, const Matrix& d_s);

Matrix relu(const Matrix& z);

}  // namespace srcpool
