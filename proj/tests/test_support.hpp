#pragma once

// Shared matrix builders and Eigen conversions for the test suites. Eigen is
// used only here, as an independent dense reference.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ascpr/sparse.hpp"

namespace ascpr::test {

inline Eigen::MatrixXd dense(CsrMatrix const& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    auto const cols = a.row_cols(i);
    auto const vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) m(i, cols[k]) = vals[k];
  }
  return m;
}

inline Eigen::MatrixXd dense(BlockCsrMatrix const& a) { return dense(a.to_scalar()); }

inline Eigen::VectorXd eig(std::vector<double> const& v) {
  return Eigen::Map<Eigen::VectorXd const>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> stl(Eigen::VectorXd const& v) {
  return {v.data(), v.data() + v.size()};
}

inline CsrMatrix from_dense(Eigen::MatrixXd const& m) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) t.push_back({static_cast<Index>(i), static_cast<Index>(j), m(i, j)});
  return CsrMatrix::from_triplets(static_cast<Index>(m.rows()), static_cast<Index>(m.cols()),
                                  std::move(t));
}

inline CsrMatrix tridiagonal(Index n, double lower, double diag, double upper) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    if (i > 0) t.push_back({i, i - 1, lower});
    t.push_back({i, i, diag});
    if (i + 1 < n) t.push_back({i, i + 1, upper});
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

inline CsrMatrix poisson1d(Index n) { return tridiagonal(n, -1.0, 2.0, -1.0); }

/// 5-point Laplacian on an nx x ny grid; `ay` scales the y couplings.
inline CsrMatrix poisson2d(Index nx, Index ny, double ay = 1.0) {
  std::vector<Triplet> t;
  auto id = [&](Index x, Index y) { return x + nx * y; };
  for (Index y = 0; y < ny; ++y)
    for (Index x = 0; x < nx; ++x) {
      Index const i = id(x, y);
      t.push_back({i, i, 2.0 + 2.0 * ay});
      if (x > 0) t.push_back({i, id(x - 1, y), -1.0});
      if (x + 1 < nx) t.push_back({i, id(x + 1, y), -1.0});
      if (y > 0) t.push_back({i, id(x, y - 1), -ay});
      if (y + 1 < ny) t.push_back({i, id(x, y + 1), -ay});
    }
  return CsrMatrix::from_triplets(nx * ny, nx * ny, std::move(t));
}

struct RandomMatrixOptions {
  double density = 0.05;      ///< expected off-diagonal fill per row, as a fraction of n
  bool symmetric_pattern = false;
  bool symmetric_values = false;
  double dominance = 1.5;     ///< diagonal = dominance * off-diagonal row sum (0: random)
  bool integer_values = false;
};

/// Random sparse matrix with a full diagonal.
inline CsrMatrix random_matrix(Index n, std::uint64_t seed, RandomMatrixOptions const& o = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(-4, 4);
  auto value = [&] {
    if (o.integer_values) {
      int v = 0;
      while (v == 0) v = small(rng);
      return static_cast<double>(v);
    }
    return unit(rng) * 2.0 - 1.0;
  };
  std::vector<Triplet> t;
  std::vector<double> rowsum(n, 0.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = o.symmetric_pattern ? i + 1 : 0; j < n; ++j) {
      if (j == i || unit(rng) >= o.density) continue;
      double const v = value();
      t.push_back({i, j, v});
      rowsum[i] += std::abs(v);
      if (o.symmetric_pattern) {
        double const w = o.symmetric_values ? v : value();
        t.push_back({j, i, w});
        rowsum[j] += std::abs(w);
      }
    }
  for (Index i = 0; i < n; ++i) {
    double d = o.dominance > 0.0 ? o.dominance * rowsum[i] + 1.0 : value();
    if (o.integer_values) d = std::ceil(d);
    t.push_back({i, i, d});
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = unit(rng);
  return v;
}

/// Random diagonally dominant block matrix on a random symmetric block pattern.
inline BlockCsrMatrix random_block_matrix(Index nb, int b, std::uint64_t seed, double density) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Triplet> t;
  std::vector<double> rowsum(static_cast<std::size_t>(nb) * b, 0.0);
  auto block = [&](Index bi, Index bj) {
    for (int r = 0; r < b; ++r)
      for (int c = 0; c < b; ++c) {
        double const v = unit(rng);
        t.push_back({bi * b + r, bj * b + c, v});
        if (bi * b + r != bj * b + c) rowsum[bi * b + r] += std::abs(v);
      }
  };
  for (Index i = 0; i < nb; ++i)
    for (Index j = i + 1; j < nb; ++j)
      if (coin(rng) < density) {
        block(i, j);
        block(j, i);
      }
  for (Index i = 0; i < nb; ++i) block(i, i);
  for (Index r = 0; r < nb * b; ++r) t.push_back({r, r, rowsum[r] + 1.0});
  return BlockCsrMatrix::from_scalar(CsrMatrix::from_triplets(nb * b, nb * b, std::move(t)), b);
}

}  // namespace ascpr::test
