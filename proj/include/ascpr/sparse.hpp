#pragma once

/// @file sparse.hpp
/// @brief Canonical CSR storage (scalar and b x b block) and the vector
/// kernels every solver component is built on.
///
/// Canonical form means: row_ptr[0] == 0, row_ptr non-decreasing, column
/// indices strictly increasing inside a row (hence no duplicates). It is
/// checked once at construction and assumed everywhere else.

#include <span>
#include <vector>

#include "ascpr/error.hpp"

namespace ascpr {

using Vector = std::vector<double>;

struct Triplet {
  Index row;
  Index col;
  double value;
};

enum class Duplicates { kSum, kReject };

class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Takes ownership of a CSR skeleton; throws InputError unless canonical.
  CsrMatrix(Index nrows, Index ncols, std::vector<Index> row_ptr,
            std::vector<Index> col_idx, std::vector<double> values);

  /// Builds a canonical matrix from unordered triplets. Duplicate (i,j)
  /// entries are summed or rejected according to `dup`.
  static CsrMatrix from_triplets(Index nrows, Index ncols,
                                 std::vector<Triplet> entries,
                                 Duplicates dup = Duplicates::kSum);

  static CsrMatrix identity(Index n);

  Index rows() const noexcept { return nrows_; }
  Index cols() const noexcept { return ncols_; }
  Index nnz() const noexcept { return static_cast<Index>(col_idx_.size()); }
  bool square() const noexcept { return nrows_ == ncols_; }

  std::span<Index const> row_ptr() const noexcept { return row_ptr_; }
  std::span<Index const> col_idx() const noexcept { return col_idx_; }
  std::span<double const> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::span<Index const> row_cols(Index i) const noexcept {
    return {col_idx_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<double const> row_values(Index i) const noexcept {
    return {values_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  /// Position of entry (i, j) in values(), or -1 when outside the pattern.
  Index find(Index i, Index j) const noexcept;

  /// Stored value of (i, j); zero outside the pattern.
  double at(Index i, Index j) const noexcept;

  /// Position of each diagonal entry, -1 where structurally absent.
  std::vector<Index> diagonal_positions() const;

  friend bool operator==(CsrMatrix const&, CsrMatrix const&) = default;

 private:
  Index nrows_ = 0;
  Index ncols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// CSR over b x b dense blocks, each block stored row-major and contiguous.
/// Square matrices must carry every diagonal block in their pattern.
class BlockCsrMatrix {
 public:
  BlockCsrMatrix() = default;

  BlockCsrMatrix(int block_size, Index block_rows, Index block_cols,
                 std::vector<Index> row_ptr, std::vector<Index> col_idx,
                 std::vector<double> values);

  /// Groups a scalar matrix into b x b blocks. Any block touched by a
  /// scalar entry is stored in full; missing diagonal blocks are added as
  /// zero blocks. Requires both dimensions divisible by b.
  static BlockCsrMatrix from_scalar(CsrMatrix const& a, int block_size);

  /// Expands back to scalar CSR, keeping every stored block entry
  /// (including explicit zeros inside stored blocks).
  CsrMatrix to_scalar() const;

  int block_size() const noexcept { return b_; }
  Index block_rows() const noexcept { return nrows_; }
  Index block_cols() const noexcept { return ncols_; }
  Index rows() const noexcept { return nrows_ * b_; }
  Index cols() const noexcept { return ncols_ * b_; }
  Index nnz_blocks() const noexcept { return static_cast<Index>(col_idx_.size()); }
  Index nnz() const noexcept { return nnz_blocks() * b_ * b_; }

  std::span<Index const> row_ptr() const noexcept { return row_ptr_; }
  std::span<Index const> col_idx() const noexcept { return col_idx_; }
  std::span<double const> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::span<double const> block(Index k) const noexcept {
    return {values_.data() + static_cast<std::size_t>(k) * b_ * b_,
            static_cast<std::size_t>(b_ * b_)};
  }
  std::span<double> block(Index k) noexcept {
    return {values_.data() + static_cast<std::size_t>(k) * b_ * b_,
            static_cast<std::size_t>(b_ * b_)};
  }

  Index find(Index bi, Index bj) const noexcept;
  std::vector<Index> diagonal_positions() const;

  friend bool operator==(BlockCsrMatrix const&, BlockCsrMatrix const&) = default;

 private:
  int b_ = 1;
  Index nrows_ = 0;
  Index ncols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// -- kernels ---------------------------------------------------------------
//
// All kernels take a worker count. Row-wise kernels parallelise over rows;
// reductions sum fixed-size chunks and then combine the chunk partials
// sequentially, so results never depend on the worker count.

void spmv(CsrMatrix const& a, std::span<double const> x, std::span<double> y,
          int workers = 1);
void spmv(BlockCsrMatrix const& a, std::span<double const> x,
          std::span<double> y, int workers = 1);
Vector spmv(CsrMatrix const& a, std::span<double const> x, int workers = 1);
Vector spmv(BlockCsrMatrix const& a, std::span<double const> x, int workers = 1);

/// r = b - A x
void residual(CsrMatrix const& a, std::span<double const> b,
              std::span<double const> x, std::span<double> r, int workers = 1);
void residual(BlockCsrMatrix const& a, std::span<double const> b,
              std::span<double const> x, std::span<double> r, int workers = 1);

double dot(std::span<double const> x, std::span<double const> y, int workers = 1);
double norm2(std::span<double const> x, int workers = 1);

/// y += alpha x
void axpy(double alpha, std::span<double const> x, std::span<double> y,
          int workers = 1);

CsrMatrix transpose(CsrMatrix const& a);

/// Scalar n x n matrix whose (i,j) entry is the Frobenius norm of block (i,j).
CsrMatrix block_norms(BlockCsrMatrix const& a);

}  // namespace ascpr
