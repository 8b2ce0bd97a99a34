#include "ascpr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ascpr/parallel.hpp"

namespace ascpr {

namespace {

constexpr Index kReductionChunk = 2048;

void check_skeleton(Index nrows, Index ncols, std::vector<Index> const& row_ptr,
                    std::vector<Index> const& col_idx, std::size_t nvalues,
                    std::size_t value_stride) {
  if (nrows < 0 || ncols < 0) throw InputError("negative matrix dimension");
  if (row_ptr.size() != static_cast<std::size_t>(nrows) + 1)
    throw InputError("row_ptr must have nrows+1 entries");
  if (row_ptr.front() != 0) throw InputError("row_ptr[0] must be 0");
  if (static_cast<std::size_t>(row_ptr.back()) != col_idx.size())
    throw InputError("row_ptr[nrows] must equal the number of stored entries");
  if (nvalues != col_idx.size() * value_stride)
    throw InputError("value array length does not match the pattern");
  for (Index i = 0; i < nrows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i])
      throw InputError("row_ptr decreases at row " + std::to_string(i));
    for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] < 0 || col_idx[k] >= ncols)
        throw InputError("column index out of range in row " + std::to_string(i));
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1])
        throw InputError("columns not strictly increasing in row " +
                         std::to_string(i));
    }
  }
}

Index find_in_row(std::span<Index const> row_ptr, std::span<Index const> col_idx,
                  Index i, Index j) noexcept {
  auto const first = col_idx.begin() + row_ptr[i];
  auto const last = col_idx.begin() + row_ptr[i + 1];
  auto const it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<Index>(it - col_idx.begin());
}

void check_length(std::size_t got, Index want, char const* what) {
  if (got != static_cast<std::size_t>(want))
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(want) + ", got " + std::to_string(got));
}

}  // namespace

// -- CsrMatrix ---------------------------------------------------------------

CsrMatrix::CsrMatrix(Index nrows, Index ncols, std::vector<Index> row_ptr,
                     std::vector<Index> col_idx, std::vector<double> values)
    : nrows_(nrows),
      ncols_(ncols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  check_skeleton(nrows_, ncols_, row_ptr_, col_idx_, values_.size(), 1);
}

CsrMatrix CsrMatrix::from_triplets(Index nrows, Index ncols,
                                   std::vector<Triplet> entries, Duplicates dup) {
  for (auto const& t : entries) {
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
      throw InputError("triplet (" + std::to_string(t.row) + "," +
                       std::to_string(t.col) + ") outside " +
                       std::to_string(nrows) + "x" + std::to_string(ncols));
  }
  std::stable_sort(entries.begin(), entries.end(), [](auto const& a, auto const& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<Index> row_ptr(static_cast<std::size_t>(nrows) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto const& t = entries[k];
    if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
      if (dup == Duplicates::kReject)
        throw InputError("duplicate entry (" + std::to_string(t.row) + "," +
                         std::to_string(t.col) + ")");
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (Index i = 0; i < nrows; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(nrows, ncols, std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

CsrMatrix CsrMatrix::identity(Index n) {
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1);
  std::vector<Index> col_idx(n);
  for (Index i = 0; i <= n; ++i) row_ptr[i] = i;
  for (Index i = 0; i < n; ++i) col_idx[i] = i;
  return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                   std::vector<double>(n, 1.0));
}

Index CsrMatrix::find(Index i, Index j) const noexcept {
  return find_in_row(row_ptr_, col_idx_, i, j);
}

double CsrMatrix::at(Index i, Index j) const noexcept {
  Index const k = find(i, j);
  return k < 0 ? 0.0 : values_[k];
}

std::vector<Index> CsrMatrix::diagonal_positions() const {
  Index const n = std::min(nrows_, ncols_);
  std::vector<Index> pos(nrows_, -1);
  for (Index i = 0; i < n; ++i) pos[i] = find(i, i);
  return pos;
}

// -- BlockCsrMatrix ----------------------------------------------------------

BlockCsrMatrix::BlockCsrMatrix(int block_size, Index block_rows, Index block_cols,
                               std::vector<Index> row_ptr,
                               std::vector<Index> col_idx,
                               std::vector<double> values)
    : b_(block_size),
      nrows_(block_rows),
      ncols_(block_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (b_ < 1) throw InputError("block size must be >= 1");
  check_skeleton(nrows_, ncols_, row_ptr_, col_idx_, values_.size(),
                 static_cast<std::size_t>(b_) * b_);
  if (nrows_ == ncols_) {
    for (Index i = 0; i < nrows_; ++i) {
      if (find(i, i) < 0)
        throw InputError("diagonal block missing in block row " + std::to_string(i));
    }
  }
}

BlockCsrMatrix BlockCsrMatrix::from_scalar(CsrMatrix const& a, int block_size) {
  int const b = block_size;
  if (b < 1) throw InputError("block size must be >= 1");
  if (a.rows() % b != 0 || a.cols() % b != 0)
    throw DimensionError("matrix dimensions " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " not divisible by block size " +
                         std::to_string(b));
  Index const nb = a.rows() / b;
  Index const mb = a.cols() / b;
  bool const square = nb == mb;

  std::vector<Index> row_ptr(static_cast<std::size_t>(nb) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<Index> marker(mb, -1);
  for (Index bi = 0; bi < nb; ++bi) {
    Index const start = static_cast<Index>(col_idx.size());
    if (square) {
      marker[bi] = bi;
      col_idx.push_back(bi);
    }
    for (int r = 0; r < b; ++r) {
      for (Index const j : a.row_cols(bi * b + r)) {
        Index const bj = j / b;
        if (marker[bj] != bi) {
          marker[bj] = bi;
          col_idx.push_back(bj);
        }
      }
    }
    std::sort(col_idx.begin() + start, col_idx.end());
    row_ptr[bi + 1] = static_cast<Index>(col_idx.size());
  }

  std::vector<double> values(col_idx.size() * b * b, 0.0);
  for (Index bi = 0; bi < nb; ++bi) {
    for (int r = 0; r < b; ++r) {
      Index const i = bi * b + r;
      auto const cols = a.row_cols(i);
      auto const vals = a.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        Index const bj = cols[k] / b;
        Index const pos = find_in_row(row_ptr, col_idx, bi, bj);
        values[static_cast<std::size_t>(pos) * b * b + r * b + cols[k] % b] = vals[k];
      }
    }
  }
  return BlockCsrMatrix(b, nb, mb, std::move(row_ptr), std::move(col_idx),
                        std::move(values));
}

CsrMatrix BlockCsrMatrix::to_scalar() const {
  int const b = b_;
  std::vector<Index> row_ptr(static_cast<std::size_t>(rows()) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(static_cast<std::size_t>(nnz()));
  values.reserve(static_cast<std::size_t>(nnz()));
  for (Index bi = 0; bi < nrows_; ++bi) {
    for (int r = 0; r < b; ++r) {
      for (Index k = row_ptr_[bi]; k < row_ptr_[bi + 1]; ++k) {
        auto const blk = block(k);
        for (int c = 0; c < b; ++c) {
          col_idx.push_back(col_idx_[k] * b + c);
          values.push_back(blk[r * b + c]);
        }
      }
      row_ptr[bi * b + r + 1] = static_cast<Index>(col_idx.size());
    }
  }
  return CsrMatrix(rows(), cols(), std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

Index BlockCsrMatrix::find(Index bi, Index bj) const noexcept {
  return find_in_row(row_ptr_, col_idx_, bi, bj);
}

std::vector<Index> BlockCsrMatrix::diagonal_positions() const {
  std::vector<Index> pos(nrows_, -1);
  for (Index i = 0; i < std::min(nrows_, ncols_); ++i) pos[i] = find(i, i);
  return pos;
}

// -- kernels -----------------------------------------------------------------

void spmv(CsrMatrix const& a, std::span<double const> x, std::span<double> y,
          int workers) {
  check_length(x.size(), a.cols(), "spmv input");
  check_length(y.size(), a.rows(), "spmv output");
  auto const rp = a.row_ptr();
  auto const ci = a.col_idx();
  auto const v = a.values();
  parallel_for(workers, 0, a.rows(), [&](Index i) {
    double sum = 0.0;
    for (Index k = rp[i]; k < rp[i + 1]; ++k) sum += v[k] * x[ci[k]];
    y[i] = sum;
  });
}

void spmv(BlockCsrMatrix const& a, std::span<double const> x, std::span<double> y,
          int workers) {
  check_length(x.size(), a.cols(), "spmv input");
  check_length(y.size(), a.rows(), "spmv output");
  int const b = a.block_size();
  auto const rp = a.row_ptr();
  auto const ci = a.col_idx();
  parallel_for(workers, 0, a.block_rows(), [&](Index bi) {
    for (int r = 0; r < b; ++r) {
      double sum = 0.0;
      for (Index k = rp[bi]; k < rp[bi + 1]; ++k) {
        double const* row = a.block(k).data() + r * b;
        double const* xb = x.data() + static_cast<std::size_t>(ci[k]) * b;
        for (int c = 0; c < b; ++c) sum += row[c] * xb[c];
      }
      y[bi * b + r] = sum;
    }
  });
}

Vector spmv(CsrMatrix const& a, std::span<double const> x, int workers) {
  Vector y(a.rows());
  spmv(a, x, y, workers);
  return y;
}

Vector spmv(BlockCsrMatrix const& a, std::span<double const> x, int workers) {
  Vector y(a.rows());
  spmv(a, x, y, workers);
  return y;
}

void residual(CsrMatrix const& a, std::span<double const> b,
              std::span<double const> x, std::span<double> r, int workers) {
  check_length(b.size(), a.rows(), "residual rhs");
  spmv(a, x, r, workers);
  parallel_for(workers, 0, a.rows(), [&](Index i) { r[i] = b[i] - r[i]; });
}

void residual(BlockCsrMatrix const& a, std::span<double const> b,
              std::span<double const> x, std::span<double> r, int workers) {
  check_length(b.size(), a.rows(), "residual rhs");
  spmv(a, x, r, workers);
  parallel_for(workers, 0, a.rows(), [&](Index i) { r[i] = b[i] - r[i]; });
}

double dot(std::span<double const> x, std::span<double const> y, int workers) {
  check_length(y.size(), static_cast<Index>(x.size()), "dot");
  Index const n = static_cast<Index>(x.size());
  Index const nchunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> partial(nchunks, 0.0);
  int const threads = nchunks > 1 ? workers : 1;
  parallel_for(threads, 0, nchunks, [&](Index c) {
    Index const end = std::min(n, (c + 1) * kReductionChunk);
    double s = 0.0;
    for (Index i = c * kReductionChunk; i < end; ++i) s += x[i] * y[i];
    partial[c] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double norm2(std::span<double const> x, int workers) {
  return std::sqrt(dot(x, x, workers));
}

void axpy(double alpha, std::span<double const> x, std::span<double> y,
          int workers) {
  check_length(y.size(), static_cast<Index>(x.size()), "axpy");
  parallel_for(workers, 0, static_cast<Index>(x.size()),
               [&](Index i) { y[i] += alpha * x[i]; });
}

CsrMatrix transpose(CsrMatrix const& a) {
  std::vector<Index> row_ptr(static_cast<std::size_t>(a.cols()) + 1, 0);
  for (Index const j : a.col_idx()) ++row_ptr[j + 1];
  for (Index j = 0; j < a.cols(); ++j) row_ptr[j + 1] += row_ptr[j];
  std::vector<Index> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<Index> col_idx(a.nnz());
  std::vector<double> values(a.nnz());
  for (Index i = 0; i < a.rows(); ++i) {
    auto const cols = a.row_cols(i);
    auto const vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      Index const dst = next[cols[k]]++;
      col_idx[dst] = i;
      values[dst] = vals[k];
    }
  }
  return CsrMatrix(a.cols(), a.rows(), std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

CsrMatrix block_norms(BlockCsrMatrix const& a) {
  std::vector<double> values(a.nnz_blocks());
  for (Index k = 0; k < a.nnz_blocks(); ++k) {
    double s = 0.0;
    for (double v : a.block(k)) s += v * v;
    values[k] = std::sqrt(s);
  }
  return CsrMatrix(a.block_rows(), a.block_cols(),
                   {a.row_ptr().begin(), a.row_ptr().end()},
                   {a.col_idx().begin(), a.col_idx().end()}, std::move(values));
}

}  // namespace ascpr
