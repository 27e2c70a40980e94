#include <gtest/gtest.h>

#include "oracles.hpp"
#include "srcpool/generators.hpp"
#include "srcpool/linalg.hpp"

using namespace srcpool;

TEST(Eigh, SmallestOfConnectedLaplacian) {
  const EigenPairs ep = eigh_range(laplacian(build_grid2d(4, 5)), EigenRange::smallest(1));
  EXPECT_NEAR(ep.values[0], 0.0, 1e-10);
  EXPECT_TRUE((ep.vectors.col(0).array() > 0.0).all());
}

TEST(Eigh, RingSpectrumAndPathTopVector) {
  const EigenPairs ring = eigh_range(laplacian(build_ring(4)), EigenRange::smallest(4));
  EXPECT_NEAR(ring.values[0], 0.0, 1e-12);
  EXPECT_NEAR(ring.values[1], 2.0, 1e-12);
  EXPECT_NEAR(ring.values[2], 2.0, 1e-12);
  EXPECT_NEAR(ring.values[3], 4.0, 1e-12);

  const EigenPairs top = eigh_range(laplacian(oracle::path_graph(2)), EigenRange::largest());
  EXPECT_NEAR(top.values[0], 2.0, 1e-12);
  EXPECT_NEAR(top.vectors(0, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(top.vectors(1, 0), -1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Eigh, ResidualSignAndTrace) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix l = laplacian(oracle::random_connected_graph(12, 0.3, seed));
    const EigenPairs ep = eigh_range(l, EigenRange::smallest(12));
    EXPECT_NEAR(ep.values.sum(), l.trace(), 1e-8 * l.norm());
    for (Index k = 0; k < 12; ++k) {
      const double resid = (l * ep.vectors.col(k) - ep.values[k] * ep.vectors.col(k)).cwiseAbs().maxCoeff();
      EXPECT_LE(resid, 1e-8 * std::max(1.0, std::abs(ep.values[k])));
      EXPECT_NEAR(ep.vectors.col(k).norm(), 1.0, 1e-12);
      for (Index i = 0; i < 12; ++i) {
        if (std::abs(ep.vectors(i, k)) > 1e-12) {
          EXPECT_GT(ep.vectors(i, k), 0.0);
          break;
        }
      }
    }
  }
}

TEST(Eigh, RejectsNonSymmetric) {
  Matrix m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_THROW(eigh_range(m, EigenRange::smallest(1)), LinalgError);
  EXPECT_THROW(eigh_range(Matrix::Zero(2, 3), EigenRange::smallest(1)), LinalgError);
}

namespace {

void expect_moore_penrose(const Matrix& s) {
  const Matrix p = pseudo_inverse(s);
  ASSERT_EQ(p.rows(), s.cols());
  ASSERT_EQ(p.cols(), s.rows());
  const double ns = std::max(s.norm(), 1e-300), np = std::max(p.norm(), 1e-300);
  EXPECT_LE((s * p * s - s).norm() / ns, 1e-8);
  EXPECT_LE((p * s * p - p).norm() / np, 1e-8);
  EXPECT_LE((s * p - (s * p).transpose()).norm(), 1e-8 * std::max(1.0, (s * p).norm()));
  EXPECT_LE((p * s - (p * s).transpose()).norm(), 1e-8 * std::max(1.0, (p * s).norm()));
}

}  // namespace

TEST(PseudoInverse, MoorePenroseIdentities) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(8));
    const Index k = 1 + static_cast<Index>(rng.below(6));
    Matrix s(n, k);
    for (Index j = 0; j < k; ++j)
      for (Index i = 0; i < n; ++i) s(i, j) = rng.uniform() < 0.4 ? 0.0 : rng.uniform();
    expect_moore_penrose(s);
    // Rank-deficient: duplicate a column.
    Matrix d(n, k + 1);
    d << s, s.col(0);
    expect_moore_penrose(d);
  }
}

TEST(PseudoInverse, Examples) {
  const Matrix q = Eigen::HouseholderQR<Matrix>(Matrix::Random(6, 3)).householderQ() * Matrix::Identity(6, 3);
  EXPECT_TRUE(pseudo_inverse(q).isApprox(q.transpose(), 1e-12));

  Matrix s = Matrix::Zero(5, 2);
  s(0, 0) = s(1, 0) = s(2, 0) = 1.0;
  s(3, 1) = s(4, 1) = 1.0;
  const Matrix p = pseudo_inverse(s);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(p(0, i), 1.0 / 3.0, 1e-12);
  for (Index i = 3; i < 5; ++i) EXPECT_NEAR(p(1, i), 0.5, 1e-12);
  EXPECT_NEAR(p(0, 3), 0.0, 1e-12);

  EXPECT_EQ(pseudo_inverse(Matrix::Zero(4, 3)), Matrix::Zero(3, 4));
}

TEST(Kron, PathEndpoints) {
  const std::vector<Index> keep = {0, 2};
  const Matrix r = kron_reduction(laplacian(oracle::path_graph(3)), keep);
  const Matrix expected = (Matrix(2, 2) << 0.5, -0.5, -0.5, 0.5).finished();
  EXPECT_TRUE(r.isApprox(expected, 1e-12));
}

TEST(Kron, KeepAllAndIsolatedKeptNode) {
  const Matrix l = laplacian(oracle::random_connected_graph(7, 0.3, 2));
  std::vector<Index> all = {0, 1, 2, 3, 4, 5, 6};
  EXPECT_TRUE(kron_reduction(l, all).isApprox(l, 1e-12));

  // Node 3 has no dropped neighbours: its row and column survive untouched.
  const Graph g(4, {{0, 1, 1.0}, {1, 2, 1.0}}, Matrix::Zero(4, 1));
  const std::vector<Index> keep = {0, 2, 3};
  const Matrix r = kron_reduction(laplacian(g), keep);
  EXPECT_EQ(r(2, 2), 0.0);
  EXPECT_EQ(r.row(2).cwiseAbs().sum(), 0.0);
  EXPECT_THROW(kron_reduction(l, std::vector<Index>{}), LinalgError);
  EXPECT_THROW(kron_reduction(l, std::vector<Index>{2, 1}), LinalgError);
}

TEST(Kron, MatchesDenseSchurAndIsLaplacian) {
  Rng rng(17);
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(9));
    const Matrix l = laplacian(oracle::random_connected_graph(n, 0.3, trial));
    std::vector<Index> keep;
    for (Index i = 0; i < n; ++i)
      if (rng.uniform() < 0.5) keep.push_back(i);
    if (keep.empty()) keep.push_back(0);
    const Matrix r = kron_reduction(l, keep);
    EXPECT_LE((r - oracle::schur_complement(l, keep)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(r.rowwise().sum().cwiseAbs().maxCoeff(), 1e-8);
    Matrix off = r;
    off.diagonal().setZero();
    EXPECT_LE(off.maxCoeff(), 1e-12);
  }
}

TEST(Kron, PreservesEffectiveResistanceOnTrees) {
  Rng rng(3);
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(7));
    const Matrix l = laplacian(oracle::random_connected_graph(n, 0.0, 100 + trial));
    std::vector<Index> keep;
    for (Index i = 0; i < n; ++i)
      if (rng.uniform() < 0.6) keep.push_back(i);
    if (keep.size() < 2) keep = {0, n - 1};
    const Matrix before = oracle::effective_resistance(l)(keep, keep);
    const Matrix after = oracle::effective_resistance(kron_reduction(l, keep));
    EXPECT_LE((before - after).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Sparsemax, Examples) {
  const Vector u = sparsemax(Vector::Constant(4, 3.0));
  EXPECT_TRUE(u.isApprox(Vector::Constant(4, 0.25)));
  EXPECT_TRUE(sparsemax((Vector(3) << 1, 0, 0).finished()).isApprox((Vector(3) << 1, 0, 0).finished()));
  const Vector p = sparsemax((Vector(3) << 0.6, 0.4, -10).finished());
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.4, 1e-15);
  EXPECT_EQ(p[2], 0.0);
}

TEST(Sparsemax, MatchesSupportEnumerationOracle) {
  Rng rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(6));
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.uniform(-2.0, 2.0);
    const Vector p = sparsemax(v);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    worst = std::max(worst, (p - oracle::simplex_projection(v)).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(Sparsemax, RowsSumToOne) {
  const Matrix m = Matrix::Random(7, 4);
  const Matrix s = sparsemax_rows(m);
  EXPECT_LE((s.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
}
