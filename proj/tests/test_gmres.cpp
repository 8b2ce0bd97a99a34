#include <limits>

#include <gtest/gtest.h>

#include "ascpr/gmres.hpp"
#include "test_support.hpp"

namespace ascpr {
namespace {

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(CsrMatrix const& a) : d_(a.rows()) {
    for (Index i = 0; i < a.rows(); ++i) d_[i] = a.at(i, i);
  }
  void apply(std::span<double const> r, std::span<double> z) const override {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / d_[i];
  }

 private:
  Vector d_;
};

TEST(Gmres, IdentityConvergesInOneStep) {
  auto const a = CsrMatrix::identity(20);
  auto const b = test::random_vector(20, 1);
  Vector x(20, 0.0);
  auto const r = gmres_solve(a, b, x, IdentityPreconditioner{}, {.tol = 1e-12});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.inner_iterations, 1);
  EXPECT_EQ(r.restarts, 1);
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(x[i], b[i], 1e-15);
}

TEST(Gmres, DiagonalSystemSolvedWithinDimension) {
  std::vector<Triplet> t;
  for (Index i = 0; i < 10; ++i) t.push_back({i, i, static_cast<double>(i + 1)});
  auto const a = CsrMatrix::from_triplets(10, 10, t);
  Vector const b(10, 1.0);
  Vector x(10, 0.0);
  auto const r = gmres_solve(a, b, x, IdentityPreconditioner{}, {.restart = 10, .tol = 1e-10});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.inner_iterations, 10);
  EXPECT_EQ(r.restarts, 1);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(x[i], 1.0 / (i + 1), 1e-9);
}

TEST(Gmres, HappyBreakdownOnEigenvector) {
  // Integer entries with every row summing to 5: the ones vector is an exact
  // eigenvector.
  auto const off = test::random_matrix(40, 4, {.density = 0.1, .dominance = 0.0, .integer_values = true});
  std::vector<Triplet> t;
  for (Index i = 0; i < 40; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < off.row_cols(i).size(); ++k)
      if (off.row_cols(i)[k] != i) {
        t.push_back({i, off.row_cols(i)[k], off.row_values(i)[k]});
        sum += off.row_values(i)[k];
      }
    t.push_back({i, i, 5.0 - sum});
  }
  auto const a = CsrMatrix::from_triplets(40, 40, t);
  Vector const b(40, 1.0);
  Vector x(40, 0.0);
  auto const r = gmres_solve(a, b, x, IdentityPreconditioner{}, {.tol = 1e-12});
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.happy_breakdown);
  EXPECT_EQ(r.inner_iterations, 1);
  for (double v : x) EXPECT_NEAR(v, 0.2, 1e-14);
}

TEST(Gmres, ZeroResidualNeedsNoIterations) {
  auto const a = test::poisson1d(5);
  Vector x{1, 2, 3, 4, 5};
  Vector const b = spmv(a, x);
  auto const r = gmres_solve(a, b, x, IdentityPreconditioner{}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.inner_iterations, 0);
}

TEST(Gmres, MatchesDenseSolveOnRandomSystems) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Index const n = 20 + static_cast<Index>(seed * 5);
    auto const a = test::random_matrix(n, seed, {.density = 0.05, .dominance = 1.1});
    auto const b = test::random_vector(n, seed + 1000);
    Vector x(n, 0.0);
    auto const r = gmres_solve(a, b, x, JacobiPreconditioner(a), {.restart = 28, .tol = 1e-10});
    ASSERT_TRUE(r.converged) << "seed " << seed;
    Eigen::VectorXd const ref = test::dense(a).partialPivLu().solve(test::eig(b));
    double const err = (test::eig(x) - ref).norm() / ref.norm();
    ASSERT_LE(err, 1e-6) << "seed " << seed;
    ASSERT_LE(r.relative_residual, 1e-10);
  }
}

TEST(Gmres, RestartsWhenKrylovSpaceIsShort) {
  auto const a = test::random_matrix(60, 5, {.density = 0.1, .dominance = 1.2});
  Vector const b(60, 1.0);
  Vector x(60, 0.0);
  auto const r = gmres_solve(a, b, x, IdentityPreconditioner{},
                             {.restart = 3, .max_restarts = 500, .tol = 1e-8});
  EXPECT_TRUE(r.converged);
  EXPECT_GT(r.restarts, 1);
  EXPECT_LE(r.relative_residual, 1e-8);
}

TEST(Gmres, ReportsNonConvergence) {
  auto const a = test::poisson1d(200);
  Vector const b(200, 1.0);
  Vector x(200, 0.0);
  auto const r = gmres_solve(a, b, x, IdentityPreconditioner{}, {.restart = 3, .max_restarts = 2, .tol = 1e-12});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.restarts, 2);
  EXPECT_EQ(r.inner_iterations, 6);
}

TEST(Gmres, NonFiniteResidualThrows) {
  auto const a = test::poisson1d(4);
  Vector b(4, 1.0);
  b[2] = std::numeric_limits<double>::quiet_NaN();
  Vector x(4, 0.0);
  EXPECT_THROW(gmres_solve(a, b, x, IdentityPreconditioner{}, {}), DivergenceError);
}

TEST(Gmres, ArgumentChecks) {
  auto const a = test::poisson1d(4);
  Vector const b(4, 1.0);
  Vector x(4, 0.0);
  Vector shortx(3, 0.0);
  EXPECT_THROW(gmres_solve(a, b, x, IdentityPreconditioner{}, {.restart = 0}), InputError);
  EXPECT_THROW(gmres_solve(a, b, x, IdentityPreconditioner{}, {.tol = 0.0}), InputError);
  EXPECT_THROW(gmres_solve(a, b, shortx, IdentityPreconditioner{}, {}), DimensionError);
}

TEST(Gmres, WorkerCountDoesNotChangeResult) {
  auto const a = test::random_matrix(3000, 2, {.density = 0.002});
  auto const b = test::random_vector(3000, 3);
  Vector x1(3000, 0.0);
  auto const r1 = gmres_solve(a, b, x1, JacobiPreconditioner(a), {.tol = 1e-8}, 1);
  for (int w : {2, 8}) {
    Vector xw(3000, 0.0);
    auto const rw = gmres_solve(a, b, xw, JacobiPreconditioner(a), {.tol = 1e-8}, w);
    EXPECT_EQ(xw, x1);
    EXPECT_EQ(rw.inner_iterations, r1.inner_iterations);
  }
}

}  // namespace
}  // namespace ascpr
