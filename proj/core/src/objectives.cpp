#include "srcpool/objectives.hpp"

#include <cmath>

#include "srcpool/linalg.hpp"

namespace srcpool {

Vector quadratic_forms(const Matrix& adjacency, const Matrix& x) {
  if (adjacency.rows() != x.rows()) throw std::invalid_argument("quadratic_forms: size mismatch");
  const Matrix lap = laplacian_from_adjacency(adjacency);
  return (x.array() * (lap * x).array()).colwise().sum().transpose();
}

LiftResult lift_reconstruct(const Graph& g, const Matrix& target, const Matrix& s,
                            const Matrix& x_pooled, bool need_grad) {
  const Index n = g.num_nodes();
  const Index f = target.cols();
  if (s.rows() != n || s.cols() != x_pooled.rows() || target.rows() != n)
    throw std::invalid_argument("lift_reconstruct: shape mismatch");

  // U = (S^+)^T from an SVD of S; going through S^T S would square its
  // condition number.
  const Matrix s_pinv = pseudo_inverse(s);
  const Matrix u = s_pinv.transpose();
  const Matrix c = s_pinv * s_pinv.transpose();  // (S^T S)^+

  LiftResult res;
  res.x_lifted = u * x_pooled;
  const Index fp = res.x_lifted.cols();

  const SparseMatrix a = g.sparse_adjacency();
  const Vector deg = g.degrees();
  const Vector inv_deg = (deg.array() > 0.0).select(deg.cwiseInverse(), 0.0);
  const Matrix mixed = inv_deg.asDiagonal() * (a * res.x_lifted);

  Matrix design(n, 2 * fp + 1);
  design << res.x_lifted, mixed, Vector::Ones(n);
  const Matrix coef = design.completeOrthogonalDecomposition().solve(target);
  res.x_reconstructed = design * coef;

  const Matrix resid = res.x_reconstructed - target;
  const double scale = 1.0 / static_cast<double>(n * f);
  res.mse = resid.squaredNorm() * scale;
  if (!need_grad) return res;

  const Matrix d_design = (2.0 * scale) * resid * coef.transpose();
  // mixed = M X_up with M = D^{-1} A, so the gradient is M^T d_mixed.
  const Matrix d_lifted = d_design.leftCols(fp) +
                          a.transpose() * (inv_deg.asDiagonal() * d_design.middleCols(fp, fp));
  res.d_x_pooled = u.transpose() * d_lifted;
  const Matrix d_u = d_lifted * x_pooled.transpose();
  const Matrix m = c * d_u.transpose() * s * c;
  res.d_selection = d_u * c - s * m - s * m.transpose();
  return res;
}

SpectralObjective::SpectralObjective(const Graph& g, bool include_aux)
    : q_(quadratic_forms(g.dense_adjacency(), g.features())), include_aux_(include_aux) {}

LossEvaluation SpectralObjective::evaluate(const Graph&, const TrainableForward& fwd,
                                           bool need_grad) const {
  const Matrix& xp = fwd.x_pooled;
  if (xp.cols() != q_.size()) throw std::invalid_argument("spectral loss: pooled feature width mismatch");
  const Vector qp = quadratic_forms(fwd.a_pooled, xp);
  const auto cols = static_cast<double>(q_.size());

  LossEvaluation out;
  out.task = (q_ - qp).cwiseAbs().sum() / cols;
  out.aux = include_aux_ ? fwd.aux_total() : 0.0;
  out.total = out.task + out.aux;
  if (!need_grad) return out;

  // d|q - q'|/dq' = -sign(q - q').
  Vector w(q_.size());
  for (Index c = 0; c < q_.size(); ++c) {
    const double diff = q_[c] - qp[c];
    w[c] = diff > 0.0 ? -1.0 / cols : (diff < 0.0 ? 1.0 / cols : 0.0);
  }
  const Matrix lap = laplacian_from_adjacency(fwd.a_pooled);
  out.grad.d_x_pooled = 2.0 * (lap * xp) * w.asDiagonal();
  // q'_c = sum_kl A'_kl (x_kc^2 - x_kc x_lc) over k != l.
  const Vector sq = xp.array().square().matrix() * w;
  Matrix d_a = sq.replicate(1, xp.rows()) - xp * w.asDiagonal() * xp.transpose();
  d_a.diagonal().setZero();
  out.grad.d_a_pooled = std::move(d_a);
  out.grad.aux_weight = include_aux_ ? 1.0 : 0.0;
  return out;
}

LossEvaluation AuxOnlyObjective::evaluate(const Graph&, const TrainableForward& fwd,
                                          bool need_grad) const {
  LossEvaluation out;
  out.aux = fwd.aux_total();
  out.total = out.aux;
  if (need_grad) out.grad.aux_weight = 1.0;
  return out;
}

LossEvaluation ReconstructionObjective::evaluate(const Graph& g, const TrainableForward& fwd,
                                                 bool need_grad) const {
  const LiftResult lift =
      lift_reconstruct(g, g.features(), fwd.selection.gated_matrix(), fwd.x_pooled, need_grad);
  LossEvaluation out;
  out.task = lift.mse;
  out.aux = include_aux_ ? fwd.aux_total() : 0.0;
  out.total = out.task + out.aux;
  if (need_grad) {
    out.grad.d_selection = lift.d_selection;
    out.grad.d_x_pooled = lift.d_x_pooled;
    out.grad.aux_weight = include_aux_ ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace srcpool
