#include "ascpr/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace ascpr::dense {

bool lu_factor(std::span<double> a, std::span<int> pivots, int n) {
  double scale = 0.0;
  for (double v : a.first(static_cast<std::size_t>(n) * n)) scale = std::max(scale, std::abs(v));
  double const tiny = scale * n * std::numeric_limits<double>::epsilon();

  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a[k * n + k]);
    for (int i = k + 1; i < n; ++i) {
      double const v = std::abs(a[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    pivots[k] = p;
    if (!(best > tiny)) return false;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
    }
    double const inv = 1.0 / a[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      double const l = a[i * n + k] * inv;
      a[i * n + k] = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n; ++j) a[i * n + j] -= l * a[k * n + j];
    }
  }
  return true;
}

void lu_solve(std::span<double const> lu, std::span<int const> pivots, int n,
              std::span<double> rhs) {
  for (int k = 0; k < n; ++k) {
    if (pivots[k] != k) std::swap(rhs[k], rhs[pivots[k]]);
  }
  for (int i = 1; i < n; ++i) {
    double s = rhs[i];
    for (int j = 0; j < i; ++j) s -= lu[i * n + j] * rhs[j];
    rhs[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < n; ++j) s -= lu[i * n + j] * rhs[j];
    rhs[i] = s / lu[i * n + i];
  }
}

void gemm_sub(std::span<double const> a, std::span<double const> b,
              std::span<double> c, int n) {
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      double const aik = a[i * n + k];
      for (int j = 0; j < n; ++j) c[i * n + j] -= aik * b[k * n + j];
    }
  }
}

void gemv_sub(std::span<double const> a, std::span<double const> x,
              std::span<double> y, int n) {
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += a[i * n + j] * x[j];
    y[i] -= s;
  }
}

void right_solve(std::span<double const> lu, std::span<int const> pivots,
                 std::span<double const> a, std::span<double> out, int n) {
  // out * (P^T L U) = a, solved as U^T L^T P out^T = a^T column by column.
  std::vector<double> row(n);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n; ++j) row[j] = a[r * n + j];
    // Solve y U = row.
    for (int j = 0; j < n; ++j) {
      double s = row[j];
      for (int k = 0; k < j; ++k) s -= row[k] * lu[k * n + j];
      row[j] = s / lu[j * n + j];
    }
    // Solve z L = y (unit lower).
    for (int j = n - 1; j >= 0; --j) {
      double s = row[j];
      for (int k = j + 1; k < n; ++k) s -= row[k] * lu[k * n + j];
      row[j] = s;
    }
    // Undo the row interchanges applied to the right operand.
    for (int k = n - 1; k >= 0; --k) {
      if (pivots[k] != k) std::swap(row[k], row[pivots[k]]);
    }
    for (int j = 0; j < n; ++j) out[r * n + j] = row[j];
  }
}

double frobenius_norm(std::span<double const> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

DenseLu::DenseLu(int n, std::vector<double> a) : n_(n), lu_(std::move(a)), pivots_(n) {
  if (lu_.size() != static_cast<std::size_t>(n) * n)
    throw DimensionError("dense LU: expected n*n values");
  if (!lu_factor(lu_, pivots_, n_)) throw SingularError("dense LU: singular matrix", 0);
}

void DenseLu::solve(std::span<double> rhs) const {
  if (rhs.size() != static_cast<std::size_t>(n_))
    throw DimensionError("dense LU: right-hand side length mismatch");
  lu_solve(lu_, pivots_, n_, rhs);
}

}  // namespace ascpr::dense
