#include "srcpool/training.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

#include "srcpool/rng.hpp"

namespace srcpool {

Adam::Adam(double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

void Adam::step(ParamSet& params, const ParamSet& grads) {
  auto& entries = params.entries();
  if (m_.empty()) {
    for (const auto& e : entries) {
      m_.push_back(Matrix::Zero(e.value.rows(), e.value.cols()));
      v_.push_back(Matrix::Zero(e.value.rows(), e.value.cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t p = 0; p < entries.size(); ++p) {
    const Matrix& g = grads.entries()[p].value;
    m_[p] = beta1_ * m_[p] + (1.0 - beta1_) * g;
    v_[p] = beta2_ * v_[p] + (1.0 - beta2_) * g.cwiseProduct(g);
    entries[p].value.array() -= lr_ * (m_[p].array() / c1) / ((v_[p].array() / c2).sqrt() + eps_);
  }
}

std::unique_ptr<Objective> make_objective(LossKind kind, const Graph& g, bool include_aux) {
  switch (kind) {
    case LossKind::Spectral: return std::make_unique<SpectralObjective>(g, include_aux);
    case LossKind::Reconstruction: return std::make_unique<ReconstructionObjective>(include_aux);
    case LossKind::AuxOnly: return std::make_unique<AuxOnlyObjective>();
  }
  throw std::invalid_argument("unknown loss kind");
}

TrainResult train(TrainablePooling& op, const Graph& g, const Objective& objective,
                  const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (cfg.patience < 1) throw std::invalid_argument("patience must be at least 1");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Adam adam(cfg.learning_rate);
  TrainResult res;
  res.best_loss = std::numeric_limits<double>::infinity();
  ParamSet best = op.params();
  int since_best = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (!op.params().all_finite())
      throw TrainingError("parameters are not finite at epoch " + std::to_string(epoch));
    const TrainableForward fwd = op.forward(g);
    LossEvaluation eval = objective.evaluate(g, fwd, true);
    if (!std::isfinite(eval.total))
      throw TrainingError("loss is not finite at epoch " + std::to_string(epoch) +
                          "; the learning rate may be too high");
    res.loss_curve.push_back(eval.total);

    if (eval.total < res.best_loss - cfg.tol) {
      res.best_loss = eval.total;
      res.best_epoch = epoch;
      best = op.params();
      since_best = 0;
    } else {
      if (eval.total < res.best_loss) {
        res.best_loss = eval.total;
        res.best_epoch = epoch;
        best = op.params();
      }
      if (++since_best >= cfg.patience) {
        res.reason = StopReason::EarlyStopping;
        break;
      }
    }
    if (cfg.time_limit_s > 0.0 &&
        std::chrono::duration<double>(Clock::now() - start).count() > cfg.time_limit_s) {
      res.reason = StopReason::TimeLimit;
      break;
    }
    const ParamSet grads = op.backward(g, fwd, eval.grad);
    if (!grads.all_finite())
      throw TrainingError("gradient is not finite at epoch " + std::to_string(epoch));
    adam.step(op.params(), grads);
  }
  if (res.best_epoch >= 0) op.params() = best;
  return res;
}

TrainResult train(TrainablePooling& op, const Graph& g, const TrainConfig& cfg) {
  const auto objective = make_objective(cfg.loss, g, cfg.include_aux);
  return train(op, g, *objective, cfg);
}

GradCheckResult gradient_check(TrainablePooling& op, const Graph& g, const Objective& objective,
                               const GradCheckConfig& cfg) {
  const Vector theta = op.params().flatten();
  const Index total = theta.size();

  const TrainableForward fwd = op.forward(g);
  const LossEvaluation eval = objective.evaluate(g, fwd, true);
  const Vector analytic = op.backward(g, fwd, eval.grad).flatten();

  std::vector<Index> coords(static_cast<std::size_t>(total));
  std::iota(coords.begin(), coords.end(), Index{0});
  if (total > cfg.max_params) {
    Rng rng(cfg.seed);
    for (Index i = 0; i < cfg.max_params; ++i) {
      const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(total - i)));
      std::swap(coords[static_cast<std::size_t>(i)], coords[static_cast<std::size_t>(j)]);
    }
    coords.resize(static_cast<std::size_t>(cfg.max_params));
  }

  auto loss_at = [&](const Vector& t) {
    op.params().assign(t);
    return objective.evaluate(g, op.forward(g), false).total;
  };

  GradCheckResult res;
  res.checked = static_cast<Index>(coords.size());
  res.analytic.resize(res.checked);
  res.numerical.resize(res.checked);
  Vector probe = theta;
  for (Index c = 0; c < res.checked; ++c) {
    const Index idx = coords[static_cast<std::size_t>(c)];
    probe[idx] = theta[idx] + cfg.step;
    const double up = loss_at(probe);
    probe[idx] = theta[idx] - cfg.step;
    const double down = loss_at(probe);
    probe[idx] = theta[idx];
    const double num = (up - down) / (2.0 * cfg.step);
    const double ana = analytic[idx];
    res.analytic[c] = ana;
    res.numerical[c] = num;
    const double denom = std::max({std::abs(ana), std::abs(num), cfg.floor});
    res.max_rel_error = std::max(res.max_rel_error, std::abs(ana - num) / denom);
  }
  op.params().assign(theta);
  return res;
}

}  // namespace srcpool
