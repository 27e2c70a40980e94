#pragma once

#include <span>

#include "srcpool/types.hpp"

namespace srcpool {

/// Eigenvalues in ascending order with unit-norm eigenvectors as columns.
///
/// Sign convention: the first component of each eigenvector whose magnitude
/// exceeds 1e-12 is positive. This makes sign-based selections reproducible.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

struct EigenRange {
  enum class Side { Smallest, Largest };
  Side side = Side::Smallest;
  Index count = 1;

  static EigenRange smallest(Index k) { return {Side::Smallest, k}; }
  static EigenRange largest(Index k = 1) { return {Side::Largest, k}; }
};

/// Dense symmetric eigendecomposition restricted to one end of the spectrum.
/// Throws LinalgError if `m` is not square or not symmetric within 1e-10.
EigenPairs eigh_range(const Matrix& m, EigenRange range);

/// All eigenvalues of a symmetric matrix, ascending.
Vector eigvalsh(const Matrix& m);

/// Moore-Penrose pseudo-inverse via SVD; singular values below
/// 1e-10 * sigma_max are treated as zero.
Matrix pseudo_inverse(const Matrix& s);

/// Pseudo-inverse of a symmetric positive semidefinite matrix through its
/// eigendecomposition (same truncation rule as pseudo_inverse).
Matrix psd_pseudo_inverse(const Matrix& m);

/// Schur complement of a combinatorial Laplacian onto the sorted, unique node
/// set `keep`: L[k,k] - L[k,d] * pinv(L[d,d]) * L[d,k]. The result is again a
/// combinatorial Laplacian and preserves effective resistances between kept
/// nodes. All induced edges are retained.
Matrix kron_reduction(const Matrix& laplacian, std::span<const Index> keep);

/// Euclidean projection of `v` onto the probability simplex.
Vector sparsemax(const Vector& v);

/// Row-wise sparsemax of a matrix.
Matrix sparsemax_rows(const Matrix& m);

}  // namespace srcpool
