#pragma once

/// @file dense.hpp
/// @brief Small dense kernels: b x b block arithmetic for BILU/block GS and
/// the LU factorisation used for the coarsest AMG level.

#include <span>
#include <vector>

#include "ascpr/error.hpp"

namespace ascpr::dense {

/// In-place LU with partial pivoting of a row-major n x n matrix.
/// Returns false when a pivot is zero relative to the matrix scale; the
/// content of `a` is unspecified in that case.
bool lu_factor(std::span<double> a, std::span<int> pivots, int n);

/// Solves LU x = P rhs in place using factors from lu_factor.
void lu_solve(std::span<double const> lu, std::span<int const> pivots, int n,
              std::span<double> rhs);

/// c -= a * b for row-major n x n blocks.
void gemm_sub(std::span<double const> a, std::span<double const> b,
              std::span<double> c, int n);

/// y -= a * x for a row-major n x n block.
void gemv_sub(std::span<double const> a, std::span<double const> x,
              std::span<double> y, int n);

/// out = a * inv(lu), where lu/pivots factor the right operand.
void right_solve(std::span<double const> lu, std::span<int const> pivots,
                 std::span<double const> a, std::span<double> out, int n);

double frobenius_norm(std::span<double const> a);

/// Owning LU factorisation of a dense matrix (coarsest-level solver).
class DenseLu {
 public:
  DenseLu() = default;

  /// Factors the row-major n x n matrix; throws SingularError on a zero pivot.
  DenseLu(int n, std::vector<double> a);

  int size() const noexcept { return n_; }
  void solve(std::span<double> rhs) const;

 private:
  int n_ = 0;
  std::vector<double> lu_;
  std::vector<int> pivots_;
};

}  // namespace ascpr::dense
