#include <gtest/gtest.h>

#include "oracles.hpp"
#include "srcpool/generators.hpp"
#include "srcpool/operators/graclus.hpp"
#include "srcpool/operators/lapool.hpp"
#include "srcpool/operators/ndp.hpp"
#include "srcpool/operators/nmf.hpp"

using namespace srcpool;

// ---------------------------------------------------------------- Graclus

TEST(Graclus, SingleNode) {
  const Graph g(1, {}, Matrix::Zero(1, 1));
  const PooledGraph p = pool(g, GraclusPooling{});
  EXPECT_EQ(p.num_supernodes(), 1);
  EXPECT_EQ(p.selection.matrix(), Matrix::Ones(1, 1));
}

TEST(Graclus, TwoDisjointEdgesMergeEach) {
  const Graph g(4, {{0, 1, 1.0}, {2, 3, 1.0}}, Matrix::Identity(4, 4));
  const GraclusPooling op;
  const PooledGraph p = pool(g, op);
  EXPECT_EQ(p.num_supernodes(), 2);
  EXPECT_EQ(graclus_matching(g), (std::vector<Index>{0, 0, 1, 1}));
  EXPECT_EQ(p.a, Matrix::Zero(2, 2));
}

TEST(Graclus, PathThreeTieGoesToLowerIndex) {
  const Graph g = oracle::path_graph(3);
  EXPECT_EQ(graclus_matching(g), (std::vector<Index>{0, 0, 1}));
  const PooledGraph p = pool(g, GraclusPooling{});
  EXPECT_EQ(p.num_supernodes(), 2);
  EXPECT_EQ(p.a, (Matrix(2, 2) << 0, 1, 1, 0).finished());
}

TEST(Graclus, MatchingInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = oracle::random_connected_graph(15, 0.2, seed);
    const auto label = graclus_matching(g);
    const Matrix a = g.dense_adjacency();
    const Index k = *std::max_element(label.begin(), label.end()) + 1;
    EXPECT_GE(k, (g.num_nodes() + 1) / 2);
    EXPECT_LE(k, g.num_nodes());
    for (Index c = 0; c < k; ++c) {
      std::vector<Index> members;
      for (Index i = 0; i < g.num_nodes(); ++i)
        if (label[static_cast<std::size_t>(i)] == c) members.push_back(i);
      ASSERT_GE(members.size(), 1u);
      ASSERT_LE(members.size(), 2u);
      if (members.size() == 2) EXPECT_GT(a(members[0], members[1]), 0.0);
    }
    // Contraction equals B^T A B with the binary membership matrix.
    const PooledGraph p = pool(g, GraclusPooling{});
    Matrix b = Matrix::Zero(g.num_nodes(), k);
    for (Index i = 0; i < g.num_nodes(); ++i) b(i, label[static_cast<std::size_t>(i)]) = 1.0;
    Matrix expected = b.transpose() * a * b;
    expected.diagonal().setZero();
    EXPECT_TRUE(p.a.isApprox(expected, 1e-12));
  }
}

TEST(Graclus, IdentityLikeSelectionKeepsAdjacency) {
  // No edges to match: every node is its own cluster and A' = A (empty).
  const Graph g(3, {}, Matrix::Identity(3, 3));
  const PooledGraph p = pool(g, GraclusPooling{});
  EXPECT_EQ(p.num_supernodes(), 3);
  EXPECT_EQ(p.x, g.features());
}

TEST(Graclus, ShuffledOrderStillMatchesAdjacentPairs) {
  const Graph g = build_grid2d(6, 6);
  const auto label = graclus_matching(g, GraclusConfig{.shuffle_seed = 3});
  EXPECT_EQ(label, graclus_matching(g, GraclusConfig{.shuffle_seed = 3}));
  const Matrix a = g.dense_adjacency();
  for (Index i = 0; i < g.num_nodes(); ++i)
    for (Index j = i + 1; j < g.num_nodes(); ++j)
      if (label[static_cast<std::size_t>(i)] == label[static_cast<std::size_t>(j)]) EXPECT_GT(a(i, j), 0.0);
}

// ---------------------------------------------------------------- NDP

TEST(Ndp, PathTwoKeepsOneNode) {
  EXPECT_EQ(ndp_keep_set(oracle::path_graph(2)), (std::vector<Index>{0}));
}

TEST(Ndp, RingFourKeepsAlternatingNodes) {
  const Graph g = build_ring(4);
  const auto keep = ndp_keep_set(g);
  ASSERT_EQ(keep.size(), 2u);
  EXPECT_EQ(keep[1] - keep[0], 2);
  const PooledGraph p = pool(g, NdpPooling{});
  // Two parallel two-hop paths of conductance 1/2 each.
  EXPECT_NEAR(p.a(0, 1), 1.0, 1e-12);
  EXPECT_EQ(p.a(0, 0), 0.0);
}

TEST(Ndp, PathThreeEndpointsAndKeepAll) {
  const Graph g = oracle::path_graph(3);
  const SelectOutput ends = SelectOutput::from_indices(3, {0, 2});
  const Matrix a = NdpPooling{}.connect(g, ends);
  EXPECT_NEAR(a(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(a(1, 0), 0.5, 1e-12);

  const Graph r = oracle::random_connected_graph(7, 0.3, 4);
  const SelectOutput all = SelectOutput::from_indices(7, {0, 1, 2, 3, 4, 5, 6});
  EXPECT_TRUE(NdpPooling{}.connect(r, all).isApprox(r.dense_adjacency(), 1e-12));
}

TEST(Ndp, KeepSetBoundsAndReducedLaplacian) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = oracle::random_connected_graph(12, 0.25, seed);
    const auto keep = ndp_keep_set(g);
    EXPECT_GE(keep.size(), 1u);
    EXPECT_LE(keep.size(), 11u);
    const PooledGraph p = pool(g, NdpPooling{});
    const Matrix l = laplacian_from_adjacency(p.a);
    EXPECT_LE(l.rowwise().sum().cwiseAbs().maxCoeff(), 1e-8);
    // Red subsamples the kept rows.
    for (std::size_t t = 0; t < keep.size(); ++t)
      EXPECT_EQ(p.x.row(static_cast<Index>(t)), g.features().row(keep[t]));
  }
}

TEST(Ndp, DisconnectedGraphPerComponent) {
  // Two disjoint edges plus an isolated node.
  const Graph g(5, {{0, 1, 1.0}, {2, 3, 1.0}}, Matrix::Zero(5, 1));
  const auto keep = ndp_keep_set(g);
  EXPECT_EQ(keep, (std::vector<Index>{0, 2, 4}));
}

TEST(Ndp, GridKeepsCheckerboard) {
  const Graph g = build_grid2d(8, 8);
  const auto keep = ndp_keep_set(g);
  EXPECT_EQ(keep.size(), 32u);
}

// ---------------------------------------------------------------- NMF

TEST(Nmf, RankOneAllOnes) {
  const NmfResult r = nmf_factorize(Matrix::Ones(4, 4), {.rank = 1, .max_iters = 2000, .tol = 1e-14, .seed = 3});
  EXPECT_LE((r.w * r.h - Matrix::Ones(4, 4)).cwiseAbs().maxCoeff(), 1e-6);
  const Vector s = r.h.transpose().col(0);
  EXPECT_LE((s.array() / s[0] - 1.0).abs().maxCoeff(), 1e-6);
}

TEST(Nmf, TwoTrianglesSeparate) {
  const Graph g(6, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}},
                Matrix::Zero(6, 1));
  const SelectOutput sel = NmfPooling({.rank = 2, .seed = 1}).select(g);
  const Matrix s = sel.matrix();
  Index arg0 = 0, arg3 = 0;
  s.row(0).maxCoeff(&arg0);
  s.row(3).maxCoeff(&arg3);
  EXPECT_NE(arg0, arg3);
  for (Index i = 0; i < 6; ++i) {
    Index arg = 0;
    s.row(i).maxCoeff(&arg);
    EXPECT_EQ(arg, i < 3 ? arg0 : arg3);
  }
}

TEST(Nmf, ObjectiveIsNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = build_erdos_renyi(20, 0.25, seed);
    const NmfResult r = nmf_factorize(g.dense_adjacency(), {.rank = 5, .max_iters = 200, .tol = 0.0, .seed = seed});
    ASSERT_EQ(r.objective.size(), 201u);
    for (std::size_t t = 1; t < r.objective.size(); ++t)
      EXPECT_LE(r.objective[t], r.objective[t - 1] * (1.0 + 1e-12) + 1e-12) << "seed " << seed << " it " << t;
    EXPECT_GE(r.w.minCoeff(), 0.0);
    EXPECT_GE(r.h.minCoeff(), 0.0);
    EXPECT_FALSE(r.converged);
  }
}

TEST(Nmf, RecoversSyntheticLowRank) {
  Rng rng(2);
  Matrix w0(30, 3), h0(3, 30);
  for (Index i = 0; i < w0.size(); ++i) w0.data()[i] = rng.uniform();
  for (Index i = 0; i < h0.size(); ++i) h0.data()[i] = rng.uniform();
  const Matrix a = w0 * h0;
  const NmfResult r = nmf_factorize(a, {.rank = 3, .max_iters = 20000, .tol = 1e-12, .seed = 5});
  EXPECT_LE((a - r.w * r.h).norm() / a.norm(), 1e-3);
}

TEST(Nmf, ReportsConvergence) {
  const NmfResult r = nmf_factorize(build_grid2d(4, 4).dense_adjacency(), {.rank = 4, .max_iters = 5000, .tol = 1e-5, .seed = 1});
  EXPECT_TRUE(r.converged);
  EXPECT_THROW(nmf_factorize(-Matrix::Ones(2, 2), {.rank = 1}), PoolingError);
}

// ---------------------------------------------------------------- LaPool

TEST(LaPool, StarCenterIsSoleLeader) {
  Matrix x(5, 2);
  x << 1, 0, 0, 1, 0, 1, 0, 1, 0, 1;
  const Graph g(5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}}, x);
  const LaPoolPooling op;
  const SelectOutput sel = op.select(g);
  EXPECT_EQ(sel.num_supernodes(), 1);
  const Vector v = lapool_signal_variation(g, 2);
  EXPECT_EQ(lapool_leaders(g, v, 0.0), (std::vector<Index>{0}));
}

TEST(LaPool, ConstantSignalIsDegenerate) {
  const Graph g = build_grid2d(3, 3).with_features(Matrix::Ones(9, 2));
  try {
    (void)LaPoolPooling{}.select(g);
    FAIL() << "expected PoolingError";
  } catch (const PoolingError& e) {
    EXPECT_STREQ(e.what(), "degenerate signal");
  }
}

TEST(LaPool, RowsOnSimplexAndLeadersShiftInvariant) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = oracle::random_connected_graph(14, 0.2, seed, 3);
    const Matrix s = LaPoolPooling{}.select(g).matrix();
    EXPECT_LE((s.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_GE(s.minCoeff(), 0.0);

    const Vector v = lapool_signal_variation(g, 2);
    const auto base = lapool_leaders(g, v, 1e-12);
    for (double shift : {-3.0, 0.5, 100.0})
      EXPECT_EQ(lapool_leaders(g, (v.array() + shift).matrix(), 1e-12), base);
  }
}

TEST(LaPool, ZeroNormFeaturesGetZeroSimilarity) {
  Matrix x(3, 1);
  x << 0, 1, 0;
  const Graph g = oracle::path_graph(3).with_features(x);
  const Matrix s = LaPoolPooling{}.select(g).matrix();
  ASSERT_EQ(s.cols(), 1);
  EXPECT_EQ(s, Matrix::Ones(3, 1));  // sparsemax of a single score
}

TEST(NonTrainable, ModifiedReduceIsSelectionTransposeTimesX) {
  const Graph g = build_sensor(24, 5);
  const Graph signal = g.with_features(Matrix::Random(24, 3));
  const GraclusPooling graclus;
  const NmfPooling nmf({.rank = 6});
  const LaPoolPooling lapool;
  const NdpPooling ndp;
  for (const PoolingOperator* op : std::initializer_list<const PoolingOperator*>{&graclus, &nmf, &lapool, &ndp}) {
    const SelectOutput sel = op->select(signal);
    EXPECT_TRUE(sel.transpose_times(signal.features()).isApprox(sel.matrix().transpose() * signal.features()))
        << op->id();
  }
  // NDP and Graclus Red coincide with S^T X for their selections.
  const SelectOutput nsel = ndp.select(signal);
  EXPECT_EQ(ndp.reduce(signal, nsel), nsel.transpose_times(signal.features()));
  const SelectOutput gsel = graclus.select(signal);
  EXPECT_TRUE(graclus.reduce(signal, gsel).isApprox(gsel.matrix().transpose() * signal.features()));
}
