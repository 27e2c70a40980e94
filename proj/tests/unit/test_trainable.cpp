#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "oracles.hpp"
#include "srcpool/eval.hpp"
#include "srcpool/generators.hpp"
#include "srcpool/nn.hpp"
#include "srcpool/objectives.hpp"
#include "srcpool/operators/dense_trainable.hpp"
#include "srcpool/operators/topk.hpp"
#include "srcpool/training.hpp"

using namespace srcpool;

namespace {

Graph sensor_signal(Index n, std::uint64_t seed, Index features = 3) {
  const Graph g = build_sensor(n, seed);
  Rng rng(seed + 100);
  Matrix x(n, features);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return g.with_features(x);
}

}  // namespace

// ---------------------------------------------------------------- nn

TEST(Propagate, TwoNodeExample) {
  const Graph g = oracle::path_graph(2);
  const Matrix p = Matrix(propagation_matrix(g));
  EXPECT_TRUE(p.isApprox(Matrix::Constant(2, 2, 0.5), 1e-15));
  Matrix x(2, 1);
  x << 1, -3;
  const Matrix out = propagate(g, x, Matrix::Ones(1, 1));
  EXPECT_TRUE(out.isApprox(Matrix::Zero(2, 1)) || out.isZero());
  const Matrix lin = propagate(g, x, Matrix::Ones(1, 1), Activation::Identity);
  EXPECT_NEAR(lin(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(lin(1, 0), -1.0, 1e-15);
}

TEST(Propagate, IsolatedNodesKeepTheirFeatures) {
  const Graph g(3, {}, Matrix::Random(3, 2));
  EXPECT_TRUE(propagate(g, g.features(), Matrix::Identity(2, 2), Activation::Identity)
                  .isApprox(g.features(), 1e-15));
}

TEST(Propagate, WeightGradientMatchesFiniteDifferences) {
  const Graph g = sensor_signal(10, 1);
  const Matrix w = glorot_uniform(3, 4, 9);
  const Matrix upstream = Matrix::Random(10, 4);
  const SparseMatrix p = propagation_matrix(g);
  for (Activation act : {Activation::Identity, Activation::Relu}) {
    auto loss = [&](const Matrix& ww) { return (propagate(p, g.features(), ww, act).array() * upstream.array()).sum(); };
    const Matrix px = p * g.features();
    const Matrix grad = propagate_weight_grad(px, propagate(p, g.features(), w, act), upstream, act);
    for (Index i = 0; i < w.size(); ++i) {
      Matrix wp = w, wm = w;
      wp.data()[i] += 1e-6;
      wm.data()[i] -= 1e-6;
      EXPECT_NEAR(grad.data()[i], (loss(wp) - loss(wm)) / 2e-6, 1e-6);
    }
  }
}

TEST(Softmax, RowsAndBackward) {
  const Matrix z = Matrix::Random(4, 3) * 5.0;
  const Matrix s = softmax_rows(z);
  EXPECT_LE((s.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-14);
  EXPECT_TRUE(softmax_rows(Matrix::Constant(1, 2, 1000.0)).isApprox(Matrix::Constant(1, 2, 0.5)));
  const Matrix up = Matrix::Random(4, 3);
  const Matrix dz = softmax_rows_backward(s, up);
  for (Index i = 0; i < z.size(); ++i) {
    Matrix zp = z, zm = z;
    zp.data()[i] += 1e-6;
    zm.data()[i] -= 1e-6;
    const double fd = ((softmax_rows(zp) - softmax_rows(zm)).array() * up.array()).sum() / 2e-6;
    EXPECT_NEAR(dz.data()[i], fd, 1e-7);
  }
}

TEST(ParamSet, FlattenAssignRoundTrip) {
  ParamSet ps;
  ps.add("a", Matrix::Random(2, 3));
  ps.add("b", Matrix::Random(1, 4));
  EXPECT_EQ(ps.num_scalars(), 10);
  ParamSet copy = ps.zeros_like();
  copy.assign(ps.flatten());
  EXPECT_EQ(copy["a"], ps["a"]);
  EXPECT_EQ(copy["b"], ps["b"]);
  EXPECT_THROW((void)ps["missing"], std::exception);
  EXPECT_EQ(glorot_uniform(3, 5, 7), glorot_uniform(3, 5, 7));
  EXPECT_LE(glorot_uniform(3, 5, 7).cwiseAbs().maxCoeff(), std::sqrt(6.0 / 8.0));
}

// ---------------------------------------------------------------- MinCut

TEST(MinCut, SaturatedIdentityAssignmentHasZeroLosses) {
  const Index n = 6;
  const Graph g = build_ring(n).with_features(Matrix::Identity(n, n));
  MinCutPooling op(n, {.k = n, .hidden = n});
  op.params()["w1"] = Matrix::Identity(n, n);
  op.params()["w2"] = 60.0 * Matrix::Identity(n, n);
  const TrainableForward f = op.forward(g);
  EXPECT_TRUE(f.selection.matrix().isApprox(Matrix::Identity(n, n), 1e-12));
  EXPECT_NEAR(f.aux[0].value, 0.0, 1e-12);  // no self loops: trace(A) = 0
  EXPECT_NEAR(f.aux[1].value, 0.0, 1e-12);
  EXPECT_TRUE(f.a_pooled.isApprox(g.dense_adjacency(), 1e-10));
}

TEST(MinCut, UniformAssignment) {
  const Graph g = sensor_signal(12, 2);
  for (Index k : {2, 3, 5}) {
    MinCutPooling op(3, {.k = k});
    op.params()["w2"].setZero();
    const TrainableForward f = op.forward(g);
    EXPECT_TRUE(f.selection.matrix().isApprox(Matrix::Constant(12, k, 1.0 / k)));
    EXPECT_NEAR(f.aux[0].value, -1.0, 1e-12);
    const double kd = static_cast<double>(k);
    EXPECT_NEAR(f.aux[1].value, std::sqrt(2.0 - 2.0 / std::sqrt(kd)), 1e-12);
  }
}

TEST(MinCut, GlobalPoolingHasNoEdges) {
  const Graph g = sensor_signal(10, 3);
  const MinCutPooling op(3, {.k = 1});
  EXPECT_TRUE(op.descriptor().is_global());
  const PooledGraph p = pool(g, op);
  EXPECT_EQ(p.num_supernodes(), 1);
  EXPECT_TRUE(p.x.isApprox(g.features().colwise().sum()));
  EXPECT_EQ(p.a, Matrix::Zero(1, 1));
}

// ---------------------------------------------------------------- DiffPool

TEST(DiffPool, UniformAssignmentLinkAndEntropy) {
  const Graph g = sensor_signal(9, 4);
  DiffPoolPooling op(3, {.k = 3});
  op.params()["w_assign"].setZero();
  const TrainableForward f = op.forward(g);
  const Matrix s = Matrix::Constant(9, 3, 1.0 / 3.0);
  EXPECT_TRUE(f.selection.matrix().isApprox(s));
  EXPECT_NEAR(f.aux[0].value, (g.dense_adjacency() - s * s.transpose()).norm() / 81.0, 1e-14);
  EXPECT_NEAR(f.aux[1].value, std::log(3.0), 1e-12);
}

TEST(DiffPool, ForwardMatchesPoolPipeline) {
  const Graph g = sensor_signal(15, 5);
  const DiffPoolPooling op(3, {.k = 4, .seed = 8});
  const TrainableForward f = op.forward(g);
  const PooledGraph p = pool(g, op);
  EXPECT_TRUE(p.x.isApprox(f.x_pooled, 1e-12));
  Matrix a = f.a_pooled;
  a.diagonal().setZero();
  EXPECT_TRUE(p.a.isApprox(a, 1e-12));
}

// ---------------------------------------------------------------- Top-K / SAGPool

TEST(TopK, ScoresAndSelection) {
  Matrix x(4, 2);
  x << 1, 0, 0, 2, 3, 0, 0, -1;
  const Graph g = oracle::path_graph(4).with_features(x);
  TopKPooling op(2, {.ratio = 0.5});
  op.params()["p"] = (Matrix(2, 1) << 3, 4).finished();
  const Vector y = op.scores(g);
  EXPECT_TRUE(y.isApprox((Vector(4) << 0.6, 1.6, 1.8, -0.8).finished()));
  const SelectOutput sel = op.select(g);
  EXPECT_EQ(std::vector<Index>(sel.nodes().begin(), sel.nodes().end()), (std::vector<Index>{1, 2}));
  const PooledGraph p = pool(g, op);
  EXPECT_NEAR(p.x(0, 1), 2.0 * std::tanh(1.6), 1e-14);
  EXPECT_NEAR(p.x(1, 0), 3.0 * std::tanh(1.8), 1e-14);
  EXPECT_EQ(p.a, (Matrix(2, 2) << 0, 1, 1, 0).finished());
}

TEST(TopK, RatioOneKeepsAllAndTiesGoLow) {
  EXPECT_EQ(top_k_indices((Vector(5) << 1, 3, 3, 0, 3).finished(), 2), (std::vector<Index>{1, 2}));
  EXPECT_EQ(top_k_indices((Vector(3) << 2, 1, 0).finished(), 3), (std::vector<Index>{0, 1, 2}));
  const Graph g = sensor_signal(11, 6);
  const TopKPooling op(3, {.ratio = 1.0});
  EXPECT_EQ(op.select(g).nodes().size(), 11u);
  EXPECT_EQ(pool(g, op).num_supernodes(), 11);
  EXPECT_EQ(pool(g, TopKPooling(3, {.ratio = 0.3})).num_supernodes(), 4);
}

TEST(TopK, ScaleInvariantScores) {
  const Graph g = sensor_signal(20, 7);
  TopKPooling op(3, {});
  const Vector base = op.scores(g);
  op.params()["p"] *= 17.5;
  EXPECT_TRUE(op.scores(g).isApprox(base, 1e-13));
}

TEST(TopK, GateFunctions) {
  EXPECT_NEAR(gate_value(GateKind::Sigmoid, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(gate_derivative(GateKind::Sigmoid, 0.0), 0.25, 1e-15);
  EXPECT_NEAR(gate_value(GateKind::Tanh, 0.3), std::tanh(0.3), 1e-15);
  EXPECT_NEAR(gate_derivative(GateKind::Tanh, 0.3), 1.0 - std::tanh(0.3) * std::tanh(0.3), 1e-15);
}

TEST(SagPool, EdgelessGraphScoresAreLinear) {
  const Graph g(5, {}, Matrix::Random(5, 3));
  SagPooling op(3, {});
  op.params()["b"](0, 0) = 0.25;
  const Vector expected = (g.features() * op.params()["w"]).array() + 0.25;
  EXPECT_TRUE(op.scores(g).isApprox(expected, 1e-14));
}

TEST(SagPool, PermutationEquivariantScores) {
  const Graph g = sensor_signal(16, 8);
  std::vector<Index> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[9]);
  const Graph h = oracle::permute(g, perm);
  const SagPooling op(3, {});
  const Vector yg = op.scores(g), yh = op.scores(h);
  for (Index i = 0; i < 16; ++i) EXPECT_NEAR(yh[perm[static_cast<std::size_t>(i)]], yg[i], 1e-12);
  const PooledGraph pg = pool(g, op), ph = pool(h, op);
  // Same kept set up to relabelling.
  std::vector<Index> mapped;
  const SelectOutput sg = op.select(g), sh = op.select(h);
  for (Index i : sg.nodes()) mapped.push_back(perm[static_cast<std::size_t>(i)]);
  std::sort(mapped.begin(), mapped.end());
  EXPECT_EQ(mapped, std::vector<Index>(sh.nodes().begin(), sh.nodes().end()));
  EXPECT_NEAR(pg.a.sum(), ph.a.sum(), 1e-12);
}

// ---------------------------------------------------------------- training

TEST(Training, ZeroEpochsLeavesParameters) {
  const Graph g = sensor_signal(12, 9);
  MinCutPooling op(3, {.k = 3});
  const Vector before = op.params().flatten();
  TrainConfig cfg;
  cfg.max_epochs = 0;
  const TrainResult r = train(op, g, cfg);
  EXPECT_TRUE(r.loss_curve.empty());
  EXPECT_EQ(op.params().flatten(), before);
}

TEST(Training, BitIdenticalCurvesForSameSeed) {
  const Graph g = sensor_signal(20, 10);
  TrainConfig cfg;
  cfg.max_epochs = 80;
  auto run = [&] {
    DiffPoolPooling op(3, {.k = 4, .seed = 3});
    return train(op, g, cfg).loss_curve;
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Training, SmoothedCurveDecreasesOnGrid) {
  const Graph base = build_grid2d(8, 8);
  const Graph g = base.with_features(signal_matrix(base));
  MinCutPooling op(g.num_features(), {.k = 32});
  const TrainResult r = train(op, g, spectral_train_defaults());
  ASSERT_GE(r.loss_curve.size(), 50u);
  // Means over consecutive windows of 10 epochs; Adam noise may lift a
  // window by a fraction of a percent.
  std::vector<double> means;
  for (std::size_t s = 0; s + 10 <= r.loss_curve.size(); s += 10)
    means.push_back(std::accumulate(r.loss_curve.begin() + static_cast<long>(s),
                                    r.loss_curve.begin() + static_cast<long>(s + 10), 0.0) / 10.0);
  for (std::size_t i = 1; i < means.size(); ++i)
    EXPECT_LE(means[i], means[i - 1] + 0.01 * std::abs(means[i - 1])) << "window " << i;
  EXPECT_LT(means.back(), 0.5 * means.front());
}

TEST(Training, EarlyStoppingRestoresBest) {
  const Graph g = sensor_signal(16, 12);
  MinCutPooling op(3, {.k = 4});
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.patience = 5;
  cfg.max_epochs = 2000;
  const TrainResult r = train(op, g, cfg);
  EXPECT_EQ(r.reason, StopReason::EarlyStopping);
  const auto obj = make_objective(LossKind::Spectral, g, true);
  EXPECT_NEAR(obj->evaluate(g, op.forward(g), false).total, r.best_loss, 1e-12);
}

TEST(Training, NonFiniteLossThrows) {
  const Graph g = sensor_signal(10, 13);
  MinCutPooling op(3, {.k = 2});
  op.params()["w1"](0, 0) = std::numeric_limits<double>::quiet_NaN();
  TrainConfig cfg;
  cfg.max_epochs = 3;
  EXPECT_THROW(train(op, g, cfg), TrainingError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamSet p;
  p.add("x", (Matrix(1, 2) << 1.0, -2.0).finished());
  ParamSet g = p.zeros_like();
  g["x"] << 4.0, -0.5;
  Adam adam(0.1);
  adam.step(p, g);
  EXPECT_NEAR(p["x"](0, 0), 0.9, 1e-8);
  EXPECT_NEAR(p["x"](0, 1), -1.9, 1e-8);
}

// ---------------------------------------------------------------- gradient checks

namespace {

void expect_gradients(TrainablePooling& op, const Graph& g, const Objective& obj, double tol) {
  const GradCheckResult r = gradient_check(op, g, obj);
  EXPECT_GT(r.checked, 0);
  EXPECT_LE(r.max_rel_error, tol) << op.id() << " / " << obj.name();
}

}  // namespace

TEST(GradCheck, MinCutSpectralAndAux) {
  const Graph g = sensor_signal(8, 14);
  MinCutPooling op(3, {.k = 4, .hidden = 6});
  expect_gradients(op, g, SpectralObjective(g, true), 1e-4);
  expect_gradients(op, g, AuxOnlyObjective(), 1e-4);
}

TEST(GradCheck, DiffPoolSpectralAndAux) {
  const Graph g = sensor_signal(8, 15);
  DiffPoolPooling op(3, {.k = 4});
  expect_gradients(op, g, SpectralObjective(g, true), 1e-4);
  expect_gradients(op, g, AuxOnlyObjective(), 1e-4);
}

TEST(GradCheck, ReconstructionLoss) {
  // Near-uniform softmax rows make S badly conditioned on larger graphs, where
  // the lift's curvature swamps central differences.
  const Graph g = build_sensor(8, 17);
  MinCutPooling mincut(2, {.k = 4, .hidden = 8});
  expect_gradients(mincut, g, ReconstructionObjective(), 1e-4);
  DiffPoolPooling diffpool(2, {.k = 4});
  expect_gradients(diffpool, g, ReconstructionObjective(), 1e-4);
}

TEST(GradCheck, ScoreSubsampling) {
  const Graph g = sensor_signal(8, 17);
  TopKPooling topk(3, {.ratio = 0.5});
  expect_gradients(topk, g, SpectralObjective(g, false), 1e-4);
  SagPooling sag(3, {.ratio = 0.5});
  expect_gradients(sag, g, SpectralObjective(g, false), 1e-4);
}

TEST(GradCheck, ZeroDirectionHasZeroGradient) {
  // With a zero signal the spectral loss is identically zero.
  const Graph g = build_sensor(8, 18).with_features(Matrix::Zero(8, 3));
  MinCutPooling op(3, {.k = 4});
  const SpectralObjective obj(g, false);
  const LossEvaluation e = obj.evaluate(g, op.forward(g), true);
  EXPECT_EQ(e.total, 0.0);
  const ParamSet grad = op.backward(g, op.forward(g), e.grad);
  EXPECT_EQ(grad.flatten().cwiseAbs().maxCoeff(), 0.0);
}
