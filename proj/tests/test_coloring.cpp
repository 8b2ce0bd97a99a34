#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ascpr/coloring.hpp"
#include "test_support.hpp"

namespace ascpr {
namespace {

// Strong pattern straight from the dense matrix.
std::set<std::pair<Index, Index>> strong_oracle(CsrMatrix const& a, double theta) {
  Eigen::MatrixXd const d = test::dense(a);
  std::set<std::pair<Index, Index>> out;
  for (Index i = 0; i < d.rows(); ++i) {
    double const sum = d.row(i).cwiseAbs().sum();
    for (Index j = 0; j < d.cols(); ++j)
      if (i != j && std::abs(d(i, j)) > theta * sum) out.insert({i, j});
  }
  return out;
}

std::set<std::pair<Index, Index>> edges(StrongConnections const& s) {
  std::set<std::pair<Index, Index>> out;
  for (Index i = 0; i < s.size(); ++i)
    for (Index j : s.neighbors(i)) out.insert({i, j});
  return out;
}

StrongConnections graph(Index n, std::vector<std::pair<Index, Index>> const& undirected) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 10.0});
  for (auto [u, v] : undirected) {
    t.push_back({u, v, -1.0});
    t.push_back({v, u, -1.0});
  }
  return symmetrize(strong_connections(CsrMatrix::from_triplets(n, n, std::move(t)), 0.0));
}

TEST(StrongConnections, ThetaOneGivesNoEdges) {
  auto const a = test::random_matrix(200, 1, {.density = 0.05, .dominance = 0.0});
  EXPECT_EQ(strong_connections(a, 1.0).edges(), 0);
}

TEST(StrongConnections, ThetaZeroOnTridiagonalIsOffDiagonalPattern) {
  auto const s = strong_connections(test::poisson1d(6), 0.0);
  EXPECT_EQ(s.edges(), 10);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) EXPECT_EQ(s.contains(i, j), std::abs(i - j) == 1);
}

TEST(StrongConnections, WeakRowHasNoEdges) {
  std::vector<Triplet> t{{0, 0, 4.0}, {0, 1, -1.0}, {0, 2, -1.0}, {0, 3, -1.0}, {0, 4, -1.0}};
  for (Index i = 1; i < 5; ++i) t.push_back({i, i, 1.0});
  auto const s = strong_connections(CsrMatrix::from_triplets(5, 5, t), 0.3);
  EXPECT_EQ(s.degree(0), 0);
  auto const s2 = strong_connections(CsrMatrix::from_triplets(5, 5, t), 0.1);
  EXPECT_EQ(s2.degree(0), 4);
}

TEST(StrongConnections, RejectsThetaOutsideUnitInterval) {
  auto const a = test::poisson1d(4);
  EXPECT_THROW(strong_connections(a, -0.1), InputError);
  EXPECT_THROW(strong_connections(a, 1.1), InputError);
}

TEST(StrongConnections, MatchesOracleAndIsWorkerInvariant) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto const a = test::random_matrix(150, seed, {.density = 0.04, .dominance = 0.0});
    for (double theta : {0.0, 0.05, 0.1, 0.25, 0.5}) {
      auto const s = strong_connections(a, theta);
      ASSERT_EQ(edges(s), strong_oracle(a, theta)) << "seed " << seed << " theta " << theta;
      auto const s4 = strong_connections(a, theta, 4);
      ASSERT_EQ(edges(s4), edges(s));
    }
  }
}

TEST(StrongConnections, EdgeCountNonIncreasingInTheta) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto const a = test::random_matrix(300, seed, {.density = 0.03, .dominance = 0.0});
    Index prev = a.nnz();
    for (int k = 0; k <= 20; ++k) {
      Index const e = strong_connections(a, k / 20.0).edges();
      ASSERT_LE(e, prev);
      prev = e;
    }
  }
}

TEST(StrongConnections, BlockFormUsesBlockNorms) {
  auto const b = test::random_block_matrix(30, 3, 4, 0.1);
  EXPECT_EQ(edges(strong_connections(b, 0.05)), strong_oracle(block_norms(b), 0.05));
}

TEST(VerticesSplitting, Singleton) {
  auto const s = graph(1, {});
  std::vector<Index> v{0};
  auto const r = vertices_splitting(v, s);
  EXPECT_EQ(r.selected, std::vector<Index>{0});
  EXPECT_TRUE(r.deferred.empty());
}

TEST(VerticesSplitting, PathPicksCenter) {
  auto const s = graph(3, {{0, 1}, {1, 2}});
  std::vector<Index> v{0, 1, 2};
  auto const r = vertices_splitting(v, s);
  EXPECT_EQ(r.selected, std::vector<Index>{1});
  EXPECT_EQ(std::set<Index>(r.deferred.begin(), r.deferred.end()), (std::set<Index>{0, 2}));
}

TEST(VerticesSplitting, StarPicksHub) {
  auto const s = graph(5, {{3, 0}, {3, 1}, {3, 2}, {3, 4}});
  std::vector<Index> v{0, 1, 2, 3, 4};
  auto const r = vertices_splitting(v, s);
  EXPECT_EQ(r.selected, std::vector<Index>{3});
  EXPECT_EQ(std::set<Index>(r.deferred.begin(), r.deferred.end()), (std::set<Index>{0, 1, 2, 4}));
}

TEST(VerticesSplitting, SelectedSetIsMaximalIndependent) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto const a = test::random_matrix(200, seed, {.density = 0.03, .symmetric_pattern = true});
    auto const s = symmetrize(strong_connections(a, 0.0));
    std::vector<Index> v(200);
    for (Index i = 0; i < 200; ++i) v[i] = i;
    auto const r = vertices_splitting(v, s);
    std::set<Index> w(r.selected.begin(), r.selected.end());
    ASSERT_EQ(r.selected.size() + r.deferred.size(), 200u);
    for (Index u : r.selected)
      for (Index j : s.neighbors(u)) ASSERT_FALSE(w.count(j));
    for (Index u : r.deferred) {
      auto const nb = s.neighbors(u);
      ASSERT_TRUE(std::any_of(nb.begin(), nb.end(), [&](Index j) { return w.count(j) > 0; }));
    }
  }
}

TEST(VerticesGrouping, ThetaOneIsSingleColor) {
  auto const a = test::random_matrix(100, 3, {.density = 0.1});
  auto const p = color_matrix(a, 1.0);
  EXPECT_EQ(p.colors(), 1);
  EXPECT_EQ(p.group(0).size(), 100u);
}

TEST(VerticesGrouping, ChainIsRedBlack) {
  auto const p = color_matrix(test::poisson1d(9), 0.0);
  ASSERT_EQ(p.colors(), 2);
  EXPECT_EQ(std::vector<Index>(p.group(0).begin(), p.group(0).end()),
            (std::vector<Index>{1, 3, 5, 7}));
  EXPECT_EQ(std::vector<Index>(p.group(1).begin(), p.group(1).end()),
            (std::vector<Index>{0, 2, 4, 6, 8}));
}

TEST(VerticesGrouping, CompleteGraphNeedsOneColorPerVertex) {
  Eigen::MatrixXd d = -Eigen::MatrixXd::Ones(4, 4);
  d.diagonal().setConstant(5.0);
  auto const p = color_matrix(test::from_dense(d), 0.0);
  EXPECT_EQ(p.colors(), 4);
  for (Index c = 0; c < 4; ++c) EXPECT_EQ(p.group(c).size(), 1u);
}

TEST(VerticesGrouping, DeterministicAcrossWorkerCounts) {
  auto const a = test::random_matrix(500, 9, {.density = 0.01, .dominance = 0.0});
  auto const p1 = color_matrix(a, 0.05, 1);
  for (int w : {2, 4, 8}) EXPECT_EQ(color_matrix(a, 0.05, w), p1);
}

TEST(ColorPartition, ValidatesGroups) {
  EXPECT_THROW(ColorPartition(3, {{0, 1}, {1, 2}}), InputError);
  EXPECT_THROW(ColorPartition(3, {{0, 1}}), InputError);
  EXPECT_THROW(ColorPartition(3, {{0, 1, 2}, {}}), InputError);
  EXPECT_THROW(ColorPartition(3, {{0, 1, 3}}), InputError);
  ColorPartition const p(3, {{2, 0}, {1}});
  EXPECT_EQ(p.color_of(0), 0);
  EXPECT_EQ(p.color_of(1), 1);
  EXPECT_EQ(p.ordering(), (std::vector<Index>{0, 2, 1}));
}

TEST(VerifyPartition, AcceptsGeneratedTridiagonalPartition) {
  auto const a = test::poisson1d(10);
  auto const r = verify_partition(a, 0.0, color_matrix(a, 0.0));
  EXPECT_TRUE(r.passed());
}

TEST(VerifyPartition, FlagsStrongEdgeInsideGroup) {
  auto const a = test::poisson1d(4);
  auto const r = verify_partition(a, 0.0, std::vector<std::vector<Index>>{{0, 1}, {2}, {3}});
  EXPECT_FALSE(r.passed());
  auto const it = std::find_if(r.checks.begin(), r.checks.end(),
                               [](auto const& c) { return c.name == "(c') strong independence"; });
  ASSERT_NE(it, r.checks.end());
  EXPECT_FALSE(it->passed);
}

TEST(VerifyPartition, FlagsColorBoundViolation) {
  auto const a = test::poisson1d(4);  // max |S_i| = 2, so at most 3 colors
  auto const r = verify_partition(a, 0.0, std::vector<std::vector<Index>>{{0}, {1}, {2}, {3}});
  for (auto const& c : r.checks) {
    if (c.name == "color bound c <= max|S_i| + 1") {
      EXPECT_FALSE(c.passed);
    } else if (c.name.rfind("(c')", 0) == 0) {
      EXPECT_TRUE(c.passed);
    }
  }
}

TEST(VerifyPartition, RandomCorpusHasNoViolations) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Index const n = 50 + static_cast<Index>(seed * 37 % 400);
    test::RandomMatrixOptions const o{.density = 0.002 + 0.002 * (seed % 10),
                                .symmetric_pattern = seed % 2 == 0,
                                .dominance = 0.0};
    auto const a = test::random_matrix(n, seed, o);
    for (double theta : {0.0, 0.1, 0.3}) {
      auto const p = color_matrix(a, theta);
      auto const r = verify_partition(a, theta, p);
      ASSERT_TRUE(r.passed()) << "seed " << seed << " theta " << theta;
      // Independent re-check of strong independence against the oracle.
      auto const strong = strong_oracle(a, theta);
      for (auto [i, j] : strong) ASSERT_NE(p.color_of(i), p.color_of(j));
    }
  }
}

TEST(Partition, WriteReadRoundTrip) {
  auto const p = color_matrix(test::poisson2d(6, 6), 0.0);
  std::stringstream s;
  write_partition(s, p);
  EXPECT_EQ(ColorPartition(36, read_partition(s)), p);
}

}  // namespace
}  // namespace ascpr
