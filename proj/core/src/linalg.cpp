#include "srcpool/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace srcpool {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kSignTol = 1e-12;
constexpr double kRankTol = 1e-10;

void require_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw LinalgError("expected a square matrix, got " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
  }
  if (m.size() == 0) return;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTol * scale)) {
    throw LinalgError("matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
}

void fix_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    for (Index r = 0; r < vectors.rows(); ++r) {
      const double v = vectors(r, c);
      if (std::abs(v) > kSignTol) {
        if (v < 0.0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

EigenPairs eigh_range(const Matrix& m, EigenRange range) {
  require_symmetric(m);
  const Index n = m.rows();
  if (range.count < 0 || range.count > n) {
    throw LinalgError("requested " + std::to_string(range.count) + " eigenpairs of a " +
                      std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  // Symmetrise exactly so roundoff asymmetry does not leak into the solver.
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw LinalgError("eigensolver did not converge");

  const Index k = range.count;
  const Index first = range.side == EigenRange::Side::Smallest ? 0 : n - k;
  EigenPairs out{solver.eigenvalues().segment(first, k), solver.eigenvectors().middleCols(first, k)};
  fix_signs(out.vectors);
  return out;
}

Vector eigvalsh(const Matrix& m) {
  require_symmetric(m);
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw LinalgError("eigensolver did not converge");
  return solver.eigenvalues();
}

Matrix pseudo_inverse(const Matrix& s) {
  if (s.size() == 0) return Matrix::Zero(s.cols(), s.rows());
  Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  Vector inv = Vector::Zero(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma_max > 0.0 && sigma(i) >= kRankTol * sigma_max) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix psd_pseudo_inverse(const Matrix& m) {
  require_symmetric(m);
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) throw LinalgError("eigensolver did not converge");
  const Vector& lambda = solver.eigenvalues();
  const double top = lambda.cwiseAbs().maxCoeff();
  Vector inv = Vector::Zero(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    if (top > 0.0 && std::abs(lambda(i)) >= kRankTol * top) inv(i) = 1.0 / lambda(i);
  }
  const Matrix& q = solver.eigenvectors();
  return q * inv.asDiagonal() * q.transpose();
}

Matrix kron_reduction(const Matrix& laplacian, std::span<const Index> keep) {
  require_symmetric(laplacian);
  const Index n = laplacian.rows();
  if (keep.empty()) throw LinalgError("kron_reduction needs a non-empty keep set");
  std::vector<char> kept(static_cast<std::size_t>(n), 0);
  for (std::size_t t = 0; t < keep.size(); ++t) {
    const Index k = keep[t];
    if (k < 0 || k >= n) throw LinalgError("keep index out of range");
    if (t > 0 && keep[t - 1] >= k) throw LinalgError("keep set must be sorted and unique");
    kept[static_cast<std::size_t>(k)] = 1;
  }
  std::vector<Index> drop;
  for (Index i = 0; i < n; ++i)
    if (!kept[static_cast<std::size_t>(i)]) drop.push_back(i);

  const std::vector<Index> keep_v(keep.begin(), keep.end());
  Matrix l_kk = laplacian(keep_v, keep_v);
  if (drop.empty()) return l_kk;

  const Matrix l_kd = laplacian(keep_v, drop);
  const Matrix l_dd = laplacian(drop, drop);
  Matrix reduced = l_kk - l_kd * psd_pseudo_inverse(l_dd) * l_kd.transpose();
  return 0.5 * (reduced + reduced.transpose());
}

Vector sparsemax(const Vector& v) {
  const Index n = v.size();
  if (n == 0) return v;
  std::vector<double> z(v.data(), v.data() + n);
  std::sort(z.begin(), z.end(), std::greater<>());
  double cumsum = 0.0;
  double tau_sum = 0.0;
  Index support = 0;
  for (Index k = 0; k < n; ++k) {
    cumsum += z[static_cast<std::size_t>(k)];
    if (1.0 + static_cast<double>(k + 1) * z[static_cast<std::size_t>(k)] > cumsum) {
      support = k + 1;
      tau_sum = cumsum;
    }
  }
  const double tau = (tau_sum - 1.0) / static_cast<double>(support);
  return (v.array() - tau).cwiseMax(0.0).matrix();
}

Matrix sparsemax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r) out.row(r) = sparsemax(m.row(r).transpose()).transpose();
  return out;
}

}  // namespace srcpool
