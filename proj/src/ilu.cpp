#include "ascpr/ilu.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

#include "ascpr/dense.hpp"
#include "ascpr/parallel.hpp"

namespace ascpr {

namespace {

constexpr int kMaxBlock = 16;

}  // namespace

LevelSchedule level_schedule(Index n, std::span<Index const> row_ptr,
                             std::span<Index const> col_idx, Triangle part) {
  bool const lower = part == Triangle::kLower;
  std::vector<Index> level(n, 0);
  Index nlevels = n > 0 ? 1 : 0;
  for (Index t = 0; t < n; ++t) {
    Index const i = lower ? t : n - 1 - t;
    Index lvl = 0;
    for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      Index const j = col_idx[k];
      if (lower ? j < i : j > i) lvl = std::max(lvl, level[j] + 1);
    }
    level[i] = lvl;
    nlevels = std::max(nlevels, lvl + 1);
  }

  LevelSchedule s;
  s.level_ptr.assign(static_cast<std::size_t>(nlevels) + 1, 0);
  for (Index i = 0; i < n; ++i) ++s.level_ptr[level[i] + 1];
  for (Index l = 0; l < nlevels; ++l) s.level_ptr[l + 1] += s.level_ptr[l];
  s.rows.resize(n);
  std::vector<Index> next(s.level_ptr.begin(), s.level_ptr.end() - 1);
  for (Index i = 0; i < n; ++i) s.rows[next[level[i]]++] = i;
  return s;
}

LevelSchedule level_schedule(CsrMatrix const& t, Triangle part) {
  return level_schedule(t.rows(), t.row_ptr(), t.col_idx(), part);
}

LevelSchedule level_schedule(BlockCsrMatrix const& t, Triangle part) {
  return level_schedule(t.block_rows(), t.row_ptr(), t.col_idx(), part);
}

BiluFactors bilu0_factorize(BlockCsrMatrix const& a, IluOptions const& options) {
  if (a.block_rows() != a.block_cols()) throw DimensionError("BILU needs a square matrix");
  int const b = a.block_size();
  if (b > kMaxBlock)
    throw InputError(fmt::format("block size {} exceeds the supported {}", b, kMaxBlock));
  Index const n = a.block_rows();
  std::size_t const bb = static_cast<std::size_t>(b) * b;

  BiluFactors f;
  f.lu_ = a;
  f.diag_pos_ = a.diagonal_positions();
  f.diag_lu_.assign(static_cast<std::size_t>(n) * bb, 0.0);
  f.diag_piv_.assign(static_cast<std::size_t>(n) * b, 0);

  BlockCsrMatrix& lu = f.lu_;
  auto const rp = lu.row_ptr();
  auto const ci = lu.col_idx();
  std::vector<Index> pos(n, -1);
  std::vector<double> tmp(bb);

  for (Index i = 0; i < n; ++i) {
    if (f.diag_pos_[i] < 0) throw SingularError("missing diagonal block", i);
    for (Index k = rp[i]; k < rp[i + 1]; ++k) pos[ci[k]] = k;

    for (Index k = rp[i]; k < rp[i + 1] && ci[k] < i; ++k) {
      Index const j = ci[k];
      // L_ij = A_ij U_jj^-1
      std::span<double const> const djlu(f.diag_lu_.data() + j * bb, bb);
      std::span<int const> const djpiv(f.diag_piv_.data() + static_cast<std::size_t>(j) * b, b);
      dense::right_solve(djlu, djpiv, lu.block(k), tmp, b);
      std::copy(tmp.begin(), tmp.end(), lu.block(k).begin());
      for (Index m = f.diag_pos_[j] + 1; m < rp[j + 1]; ++m) {
        Index const p = pos[ci[m]];
        if (p >= 0) dense::gemm_sub(lu.block(k), lu.block(m), lu.block(p), b);
      }
    }

    auto const d = lu.block(f.diag_pos_[i]);
    std::span<double> dlu(f.diag_lu_.data() + i * bb, bb);
    std::span<int> dpiv(f.diag_piv_.data() + static_cast<std::size_t>(i) * b, b);
    std::copy(d.begin(), d.end(), dlu.begin());
    if (!dense::lu_factor(dlu, dpiv, b)) {
      if (!options.perturb_singular_pivots) throw SingularError("singular pivot block", i);
      double const norm = dense::frobenius_norm(d);
      double const shift = options.perturbation * (norm > 0.0 ? norm : 1.0);
      for (int r = 0; r < b; ++r) d[r * b + r] += shift;
      std::copy(d.begin(), d.end(), dlu.begin());
      if (!dense::lu_factor(dlu, dpiv, b))
        throw SingularError("singular pivot block after perturbation", i);
      f.perturbed_.push_back(i);
    }

    for (Index k = rp[i]; k < rp[i + 1]; ++k) pos[ci[k]] = -1;
  }

  f.lower_levels_ = level_schedule(lu, Triangle::kLower);
  f.upper_levels_ = level_schedule(lu, Triangle::kUpper);
  return f;
}

BiluFactors bilu0_factorize(CsrMatrix const& a, IluOptions const& options) {
  return bilu0_factorize(BlockCsrMatrix::from_scalar(a, 1), options);
}

BlockCsrMatrix BiluFactors::lower() const {
  int const b = lu_.block_size();
  std::size_t const bb = static_cast<std::size_t>(b) * b;
  Index const n = lu_.block_rows();
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  for (Index i = 0; i < n; ++i) {
    for (Index k = lu_.row_ptr()[i]; k < diag_pos_[i]; ++k) {
      col_idx.push_back(lu_.col_idx()[k]);
      auto const blk = lu_.block(k);
      values.insert(values.end(), blk.begin(), blk.end());
    }
    col_idx.push_back(i);
    for (std::size_t q = 0; q < bb; ++q) values.push_back(q % (b + 1) == 0 ? 1.0 : 0.0);
    row_ptr[i + 1] = static_cast<Index>(col_idx.size());
  }
  return BlockCsrMatrix(b, n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

BlockCsrMatrix BiluFactors::upper() const {
  int const b = lu_.block_size();
  Index const n = lu_.block_rows();
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  for (Index i = 0; i < n; ++i) {
    for (Index k = diag_pos_[i]; k < lu_.row_ptr()[i + 1]; ++k) {
      col_idx.push_back(lu_.col_idx()[k]);
      auto const blk = lu_.block(k);
      values.insert(values.end(), blk.begin(), blk.end());
    }
    row_ptr[i + 1] = static_cast<Index>(col_idx.size());
  }
  return BlockCsrMatrix(b, n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

void BiluFactors::forward_row(Index i, std::span<double const> r, std::span<double> y) const {
  int const b = lu_.block_size();
  double tmp[kMaxBlock];
  for (int q = 0; q < b; ++q) tmp[q] = r[static_cast<std::size_t>(i) * b + q];
  auto const rp = lu_.row_ptr();
  auto const ci = lu_.col_idx();
  for (Index k = rp[i]; k < diag_pos_[i]; ++k) {
    dense::gemv_sub(lu_.block(k), y.subspan(static_cast<std::size_t>(ci[k]) * b, b),
                    {tmp, static_cast<std::size_t>(b)}, b);
  }
  for (int q = 0; q < b; ++q) y[static_cast<std::size_t>(i) * b + q] = tmp[q];
}

void BiluFactors::backward_row(Index i, std::span<double> z) const {
  int const b = lu_.block_size();
  std::size_t const bb = static_cast<std::size_t>(b) * b;
  double tmp[kMaxBlock];
  for (int q = 0; q < b; ++q) tmp[q] = z[static_cast<std::size_t>(i) * b + q];
  auto const rp = lu_.row_ptr();
  auto const ci = lu_.col_idx();
  for (Index k = diag_pos_[i] + 1; k < rp[i + 1]; ++k) {
    dense::gemv_sub(lu_.block(k), z.subspan(static_cast<std::size_t>(ci[k]) * b, b),
                    {tmp, static_cast<std::size_t>(b)}, b);
  }
  dense::lu_solve({diag_lu_.data() + i * bb, bb},
                  {diag_piv_.data() + static_cast<std::size_t>(i) * b, static_cast<std::size_t>(b)},
                  b, {tmp, static_cast<std::size_t>(b)});
  for (int q = 0; q < b; ++q) z[static_cast<std::size_t>(i) * b + q] = tmp[q];
}

void BiluFactors::apply(std::span<double const> r, std::span<double> z, int workers) const {
  if (r.size() != static_cast<std::size_t>(rows()) || z.size() != r.size())
    throw DimensionError(fmt::format("BILU apply: expected length {}, got {} and {}", rows(),
                                     r.size(), z.size()));
  // z doubles as the intermediate y = L^-1 r; each row reads only finished rows.
  for (Index l = 0; l < lower_levels_.levels(); ++l) {
    auto const rows_l = lower_levels_.level(l);
    parallel_for(workers, 0, static_cast<Index>(rows_l.size()),
                 [&](Index t) { forward_row(rows_l[t], r, z); });
  }
  for (Index l = 0; l < upper_levels_.levels(); ++l) {
    auto const rows_l = upper_levels_.level(l);
    parallel_for(workers, 0, static_cast<Index>(rows_l.size()),
                 [&](Index t) { backward_row(rows_l[t], z); });
  }
}

void BiluFactors::apply_sequential(std::span<double const> r, std::span<double> z) const {
  if (r.size() != static_cast<std::size_t>(rows()) || z.size() != r.size())
    throw DimensionError("BILU apply: length mismatch");
  Index const n = lu_.block_rows();
  for (Index i = 0; i < n; ++i) forward_row(i, r, z);
  for (Index i = n - 1; i >= 0; --i) backward_row(i, z);
}

Vector bilu_apply(BiluFactors const& f, std::span<double const> r, int workers) {
  Vector z(r.size());
  f.apply(r, z, workers);
  return z;
}

}  // namespace ascpr
