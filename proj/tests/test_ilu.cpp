#include <gtest/gtest.h>

#include "ascpr/coloring.hpp"
#include "ascpr/ilu.hpp"
#include "test_support.hpp"

namespace ascpr {
namespace {

// Textbook IKJ incomplete factorisation on dense storage, restricted to the
// block pattern of `a`. Returns the packed L\U blocks.
Eigen::MatrixXd dense_bilu0(BlockCsrMatrix const& a) {
  int const b = a.block_size();
  Index const n = a.block_rows();
  Eigen::MatrixXd m = test::dense(a);
  auto in_pattern = [&](Index i, Index j) { return a.find(i, j) >= 0; };
  auto blk = [&](Index i, Index j) { return m.block(i * b, j * b, b, b); };
  for (Index i = 1; i < n; ++i)
    for (Index k = 0; k < i; ++k) {
      if (!in_pattern(i, k)) continue;
      Eigen::MatrixXd const lik = blk(i, k) * Eigen::MatrixXd(blk(k, k)).inverse();
      blk(i, k) = lik;
      for (Index j = k + 1; j < n; ++j)
        if (in_pattern(i, j) && in_pattern(k, j)) blk(i, j) -= lik * blk(k, j);
    }
  return m;
}

Eigen::MatrixXd lower_of(Eigen::MatrixXd const& lu, int b) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(lu.rows(), lu.cols());
  for (Eigen::Index i = 0; i < lu.rows(); ++i)
    for (Eigen::Index j = 0; j < lu.cols(); ++j)
      if (j / b < i / b) l(i, j) = lu(i, j);
  return l;
}

Eigen::MatrixXd upper_of(Eigen::MatrixXd const& lu, int b) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(lu.rows(), lu.cols());
  for (Eigen::Index i = 0; i < lu.rows(); ++i)
    for (Eigen::Index j = 0; j < lu.cols(); ++j)
      if (j / b >= i / b) u(i, j) = lu(i, j);
  return u;
}

TEST(Bilu0, BlockDiagonalGivesIdentityLower) {
  std::vector<Triplet> t{{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0},
                         {2, 2, 4.0}, {2, 3, -1.0}, {3, 2, 0.5}, {3, 3, 5.0}};
  auto const a = BlockCsrMatrix::from_scalar(CsrMatrix::from_triplets(4, 4, t), 2);
  auto const f = bilu0_factorize(a);
  EXPECT_TRUE(test::dense(f.lower()).isApprox(Eigen::MatrixXd::Identity(4, 4), 0.0));
  EXPECT_TRUE(test::dense(f.upper()).isApprox(test::dense(a), 0.0));
}

TEST(Bilu0, TwoByTwoExample) {
  auto const a = CsrMatrix::from_triplets(2, 2, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  auto const f = bilu0_factorize(a);
  Eigen::MatrixXd l(2, 2), u(2, 2);
  l << 1, 0, 0.25, 1;
  u << 4, 1, 0, 2.75;
  EXPECT_TRUE(test::dense(f.lower()).isApprox(l, 0.0));
  EXPECT_TRUE(test::dense(f.upper()).isApprox(u, 0.0));
  auto const z = bilu_apply(f, Vector{5, 4});
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_DOUBLE_EQ(z[1], 1.0);
}

TEST(Bilu0, ArrowMatrixReproducesPatternEntries) {
  Index const n = 8;
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, 10.0 + i});
    if (i > 0) {
      t.push_back({0, i, 1.0});
      t.push_back({i, 0, 2.0});
    }
  }
  auto const a = CsrMatrix::from_triplets(n, n, t);
  auto const f = bilu0_factorize(a);
  Eigen::MatrixXd const prod = test::dense(f.lower()) * test::dense(f.upper());
  Eigen::MatrixXd const d = test::dense(a);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (d(i, j) != 0.0) {
        EXPECT_NEAR(prod(i, j), d(i, j), 1e-12);
      }
  // Fill at (i, j), i, j > 0, i != j is dropped, so LU differs there.
  EXPECT_NE(prod(1, 2), 0.0);
}

TEST(Bilu0, MatchesDenseOracleAndReconstructsPattern) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    int const b = 1 + static_cast<int>(seed % 4);
    Index const nb = 5 + static_cast<Index>(seed % 23);
    auto const a = test::random_block_matrix(nb, b, seed, 0.15);
    auto const f = bilu0_factorize(a);
    Eigen::MatrixXd const lu = dense_bilu0(a);
    Eigen::MatrixXd const l = test::dense(f.lower());
    Eigen::MatrixXd const u = test::dense(f.upper());
    ASSERT_LE((l - lower_of(lu, b)).cwiseAbs().maxCoeff(), 1e-12) << "seed " << seed;
    ASSERT_LE((u - upper_of(lu, b)).cwiseAbs().maxCoeff(), 1e-12) << "seed " << seed;
    Eigen::MatrixXd const prod = l * u;
    Eigen::MatrixXd const d = test::dense(a);
    double const scale = d.cwiseAbs().maxCoeff();
    for (Index bi = 0; bi < nb; ++bi)
      for (Index k = a.row_ptr()[bi]; k < a.row_ptr()[bi + 1]; ++k) {
        Index const bj = a.col_idx()[k];
        ASSERT_LE((prod.block(bi * b, bj * b, b, b) - d.block(bi * b, bj * b, b, b))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-12 * scale)
            << "seed " << seed << " block " << bi << "," << bj;
      }
  }
}

TEST(Bilu0, DensePatternIsExactLu) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Random(12, 12);
  d.diagonal().array() += 12.0;
  auto const f = bilu0_factorize(BlockCsrMatrix::from_scalar(test::from_dense(d), 3));
  auto const r = test::random_vector(12, 3);
  Eigen::VectorXd const ref = d.partialPivLu().solve(test::eig(r));
  auto const z = bilu_apply(f, r);
  for (int i = 0; i < 12; ++i) EXPECT_NEAR(z[i], ref[i], 1e-12);
}

TEST(Bilu0, ApplyInvertsTheFactors) {
  auto const a = test::random_block_matrix(60, 3, 7, 0.05);
  auto const f = bilu0_factorize(a);
  auto const r = test::random_vector(180, 8);
  Eigen::MatrixXd const lu = test::dense(f.lower()) * test::dense(f.upper());
  Eigen::VectorXd const ref = lu.partialPivLu().solve(test::eig(r));
  auto const z = bilu_apply(f, r);
  for (int i = 0; i < 180; ++i) EXPECT_NEAR(z[i], ref[i], 1e-11 * (1 + std::abs(ref[i])));
}

TEST(Bilu0, ParallelApplyIsBitwiseSequential) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto const a = test::random_block_matrix(300, 2 + static_cast<int>(seed % 3), seed, 0.01);
    auto const f = bilu0_factorize(a);
    auto const r = test::random_vector(a.rows(), seed + 50);
    Vector seq(a.rows());
    f.apply_sequential(r, seq);
    for (int w : {1, 2, 8}) ASSERT_EQ(bilu_apply(f, r, w), seq) << "workers " << w;
  }
}

TEST(Bilu0, SingularPivotIsPerturbedOrReported) {
  auto const a = CsrMatrix::from_triplets(2, 2, {{0, 0, 0.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  auto const f = bilu0_factorize(a);
  EXPECT_EQ(f.perturbed_rows(), std::vector<Index>{0});
  EXPECT_DOUBLE_EQ(test::dense(f.upper())(0, 0), 1e-8);
  try {
    bilu0_factorize(a, {.perturb_singular_pivots = false});
    FAIL() << "expected SingularError";
  } catch (SingularError const& e) {
    EXPECT_EQ(e.row(), 0);
  }
  // A missing diagonal is stored as an explicit zero, then handled like one.
  auto const missing = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}});
  EXPECT_EQ(bilu0_factorize(missing).perturbed_rows(), std::vector<Index>{1});
  EXPECT_THROW(bilu0_factorize(missing, {.perturb_singular_pivots = false}), SingularError);
}

TEST(LevelSchedule, DiagonalIsOneLevel) {
  auto const s = level_schedule(CsrMatrix::identity(10), Triangle::kLower);
  EXPECT_EQ(s.levels(), 1);
  EXPECT_EQ(s.level(0).size(), 10u);
}

TEST(LevelSchedule, ChainIsOneRowPerLevel) {
  auto const a = test::poisson1d(7);
  auto const lo = level_schedule(a, Triangle::kLower);
  auto const up = level_schedule(a, Triangle::kUpper);
  ASSERT_EQ(lo.levels(), 7);
  ASSERT_EQ(up.levels(), 7);
  for (Index l = 0; l < 7; ++l) {
    EXPECT_EQ(lo.level(l)[0], l);
    EXPECT_EQ(up.level(l)[0], 6 - l);
  }
}

TEST(LevelSchedule, RedBlackOrderingHasTwoLevels) {
  auto const a = test::poisson2d(6, 6);
  auto const order = color_matrix(a, 0.0).ordering();
  std::vector<Index> pos(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<Index>(k);
  std::vector<Triplet> t;
  for (Index i = 0; i < a.rows(); ++i) {
    auto const cols = a.row_cols(i);
    auto const vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) t.push_back({pos[i], pos[cols[k]], vals[k]});
  }
  auto const p = CsrMatrix::from_triplets(a.rows(), a.rows(), std::move(t));
  EXPECT_EQ(level_schedule(p, Triangle::kLower).levels(), 2);
  EXPECT_EQ(level_schedule(p, Triangle::kUpper).levels(), 2);
}

TEST(LevelSchedule, PredecessorsSitInEarlierLevels) {
  auto const a = test::random_matrix(400, 3, {.density = 0.01});
  for (auto part : {Triangle::kLower, Triangle::kUpper}) {
    auto const s = level_schedule(a, part);
    std::vector<Index> level(400, -1);
    for (Index l = 0; l < s.levels(); ++l)
      for (Index i : s.level(l)) level[i] = l;
    for (Index i = 0; i < 400; ++i) {
      ASSERT_GE(level[i], 0);
      for (Index j : a.row_cols(i)) {
        bool const dep = part == Triangle::kLower ? j < i : j > i;
        if (dep) {
          ASSERT_LT(level[j], level[i]);
        }
      }
    }
  }
}

}  // namespace
}  // namespace ascpr
