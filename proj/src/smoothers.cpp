#include "ascpr/smoothers.hpp"

#include <algorithm>
#include <atomic>

#include <fmt/format.h>

#include "ascpr/dense.hpp"
#include "ascpr/parallel.hpp"

namespace ascpr {

namespace {

constexpr int kMaxBlock = 16;

}  // namespace

struct GaussSeidel::View {
  Index n;
  int b;
  std::span<Index const> rp;
  std::span<Index const> ci;
  std::span<double const> vals;

  static View of(CsrMatrix const& a) {
    if (!a.square()) throw DimensionError("Gauss-Seidel needs a square matrix");
    return {a.rows(), 1, a.row_ptr(), a.col_idx(), a.values()};
  }
  static View of(BlockCsrMatrix const& a) {
    if (a.block_rows() != a.block_cols())
      throw DimensionError("Gauss-Seidel needs a square matrix");
    return {a.block_rows(), a.block_size(), a.row_ptr(), a.col_idx(), a.values()};
  }

  bool coupled(Index k) const {
    std::size_t const bb = static_cast<std::size_t>(b) * b;
    auto const blk = vals.subspan(static_cast<std::size_t>(k) * bb, bb);
    return std::any_of(blk.begin(), blk.end(), [](double v) { return v != 0.0; });
  }
};

namespace {

// New value of (block) row i from the current iterate, read through `load`.
// Every sweep variant funnels through here so their arithmetic is identical.
template <class Load>
void relax_row(Index i, int b, std::span<Index const> rp, std::span<Index const> ci,
               std::span<double const> vals, std::span<double const> diag,
               std::span<int const> pivots, std::span<double const> rhs, Load&& load,
               double* out) {
  if (b == 1) {
    double s = rhs[i];
    for (Index k = rp[i]; k < rp[i + 1]; ++k) {
      Index const j = ci[k];
      if (j != i) s -= vals[k] * load(j);
    }
    out[0] = s / diag[i];
    return;
  }
  std::size_t const bb = static_cast<std::size_t>(b) * b;
  double tmp[kMaxBlock];
  for (int r = 0; r < b; ++r) tmp[r] = rhs[static_cast<std::size_t>(i) * b + r];
  for (Index k = rp[i]; k < rp[i + 1]; ++k) {
    Index const j = ci[k];
    if (j == i) continue;
    double const* blk = vals.data() + k * bb;
    for (int r = 0; r < b; ++r) {
      double s = 0.0;
      for (int c = 0; c < b; ++c) s += blk[r * b + c] * load(j * b + c);
      tmp[r] -= s;
    }
  }
  dense::lu_solve(diag.subspan(i * bb, bb), pivots.subspan(static_cast<std::size_t>(i) * b, b),
                  b, {tmp, static_cast<std::size_t>(b)});
  for (int r = 0; r < b; ++r) out[r] = tmp[r];
}

void check_vectors(Index n, int b, std::span<double const> rhs, std::span<double> x) {
  std::size_t const want = static_cast<std::size_t>(n) * b;
  if (rhs.size() != want || x.size() != want)
    throw DimensionError(fmt::format("Gauss-Seidel: expected vectors of length {}, got {} and {}",
                                     want, rhs.size(), x.size()));
}

std::shared_ptr<ColorPartition const> borrow(ColorPartition const& p) {
  return std::shared_ptr<ColorPartition const>(std::shared_ptr<void>{}, &p);
}

}  // namespace

GaussSeidel::GaussSeidel(CsrMatrix const& a, SmootherSpec spec) : spec_(std::move(spec)) {
  init(View::of(a));
}

GaussSeidel::GaussSeidel(BlockCsrMatrix const& a, SmootherSpec spec) : spec_(std::move(spec)) {
  init(View::of(a));
}

void GaussSeidel::init(View const& a) {
  if (spec_.sweeps < 1) throw InputError("smoother needs at least one sweep");
  if (a.b > kMaxBlock)
    throw InputError(fmt::format("block size {} exceeds the supported {}", a.b, kMaxBlock));
  n_ = a.n;
  block_ = a.b;
  std::size_t const bb = static_cast<std::size_t>(block_) * block_;

  diag_.assign(static_cast<std::size_t>(n_) * bb, 0.0);
  if (block_ > 1) pivots_.assign(static_cast<std::size_t>(n_) * block_, 0);
  for (Index i = 0; i < n_; ++i) {
    auto const first = a.ci.begin() + a.rp[i];
    auto const last = a.ci.begin() + a.rp[i + 1];
    auto const it = std::lower_bound(first, last, i);
    if (it == last || *it != i) throw SingularError("missing diagonal entry", i);
    std::size_t const k = static_cast<std::size_t>(it - a.ci.begin());
    if (block_ == 1) {
      if (a.vals[k] == 0.0) throw SingularError("zero diagonal entry", i);
      diag_[i] = a.vals[k];
      continue;
    }
    std::copy_n(a.vals.begin() + k * bb, bb, diag_.begin() + i * bb);
    bool const ok = dense::lu_factor(std::span(diag_).subspan(i * bb, bb),
                                     std::span(pivots_).subspan(i * block_, block_), block_);
    if (!ok) throw SingularError("singular diagonal block", i);
  }

  if (spec_.kind != SmootherKind::kPgsScm) return;
  if (!spec_.partition) throw InputError("PGS-SCM needs a color partition");
  ColorPartition const& part = *spec_.partition;
  if (part.size() != n_)
    throw DimensionError(fmt::format("partition covers {} vertices, matrix has {} rows",
                                     part.size(), n_));

  auto build = [&](bool forward) {
    std::vector<ColorLevels> schedule;
    std::vector<Index> level(n_, 0);
    // A later row must also wait until every earlier row reading it is done.
    std::vector<Index> floor(n_, 0);
    bool const ordered = spec_.same_color == SameColorRule::kOrdered;
    Index const c = part.colors();
    for (Index step = 0; step < c; ++step) {
      Index const color = forward ? step : c - 1 - step;
      auto const group = part.group(color);
      ColorLevels cl;
      Index nlevels = 1;
      for (std::size_t t = 0; t < group.size(); ++t) {
        Index const i = forward ? group[t] : group[group.size() - 1 - t];
        Index lvl = floor[i];
        for (Index k = a.rp[i]; k < a.rp[i + 1]; ++k) {
          Index const j = a.ci[k];
          if (j == i || part.color_of(j) != color || !a.coupled(k)) continue;
          cl.independent = false;
          bool const earlier = forward ? j < i : j > i;
          if (earlier && ordered) lvl = std::max(lvl, level[j] + 1);
        }
        level[i] = lvl;
        if (ordered) {
          for (Index k = a.rp[i]; k < a.rp[i + 1]; ++k) {
            Index const j = a.ci[k];
            bool const later = forward ? j > i : j < i;
            if (later && part.color_of(j) == color && a.coupled(k))
              floor[j] = std::max(floor[j], lvl + 1);
          }
        }
        nlevels = std::max(nlevels, lvl + 1);
      }
      // Bucket rows by level, keeping traversal order inside each level.
      cl.level_ptr.assign(static_cast<std::size_t>(nlevels) + 1, 0);
      for (Index i : group) ++cl.level_ptr[level[i] + 1];
      for (Index l = 0; l < nlevels; ++l) cl.level_ptr[l + 1] += cl.level_ptr[l];
      cl.rows.resize(group.size());
      std::vector<Index> next(cl.level_ptr.begin(), cl.level_ptr.end() - 1);
      for (std::size_t t = 0; t < group.size(); ++t) {
        Index const i = forward ? group[t] : group[group.size() - 1 - t];
        cl.rows[next[level[i]]++] = i;
      }
      schedule.push_back(std::move(cl));
    }
    return schedule;
  };
  forward_schedule_ = build(true);
  backward_schedule_ = build(false);
}

void GaussSeidel::sweep(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
                        SweepDirection direction) const {
  run(View::of(a), b, x, direction);
}

void GaussSeidel::sweep(BlockCsrMatrix const& a, std::span<double const> b,
                        std::span<double> x, SweepDirection direction) const {
  run(View::of(a), b, x, direction);
}

void GaussSeidel::apply(CsrMatrix const& a, std::span<double const> b,
                        std::span<double> x) const {
  View const v = View::of(a);
  for (int s = 0; s < spec_.sweeps; ++s) run(v, b, x, spec_.direction);
}

void GaussSeidel::apply(BlockCsrMatrix const& a, std::span<double const> b,
                        std::span<double> x) const {
  View const v = View::of(a);
  for (int s = 0; s < spec_.sweeps; ++s) run(v, b, x, spec_.direction);
}

void GaussSeidel::run(View const& a, std::span<double const> b, std::span<double> x,
                      SweepDirection direction) const {
  if (a.n != n_ || a.b != block_)
    throw DimensionError("smoother was set up for a different matrix");
  check_vectors(n_, block_, b, x);
  switch (direction) {
    case SweepDirection::kForward:
      run_one(a, b, x, true);
      break;
    case SweepDirection::kBackward:
      run_one(a, b, x, false);
      break;
    case SweepDirection::kSymmetric:
      run_one(a, b, x, true);
      run_one(a, b, x, false);
      break;
  }
}

void GaussSeidel::run_one(View const& a, std::span<double const> b, std::span<double> x,
                          bool forward) const {
  int const bs = block_;
  auto plain = [&](Index q) { return x[q]; };
  auto relax = [&](Index i, auto&& load, double* out) {
    relax_row(i, bs, a.rp, a.ci, a.vals, diag_, pivots_, b, load, out);
  };

  switch (spec_.kind) {
    case SmootherKind::kClassicGs: {
      for (Index t = 0; t < n_; ++t) {
        Index const i = forward ? t : n_ - 1 - t;
        relax(i, plain, x.data() + static_cast<std::size_t>(i) * bs);
      }
      return;
    }

    case SmootherKind::kPgsNo: {
      // Relaxed atomics: cross-seam reads are racy by design but well defined.
      auto shared = [&](Index q) {
        return std::atomic_ref<double>(x[q]).load(std::memory_order_relaxed);
      };
      int const chunks = std::max(1, std::min<int>(spec_.workers, std::max<Index>(n_, 1)));
      parallel_chunks(chunks, [&](int c) {
        RowRange const r = chunk_range(n_, chunks, c);
        double out[kMaxBlock];
        for (Index t = r.begin; t < r.end; ++t) {
          Index const i = forward ? t : r.end - 1 - (t - r.begin);
          relax(i, shared, out);
          for (int q = 0; q < bs; ++q)
            std::atomic_ref<double>(x[static_cast<std::size_t>(i) * bs + q])
                .store(out[q], std::memory_order_relaxed);
        }
      });
      return;
    }

    case SmootherKind::kPgsScm: {
      auto const& schedule = forward ? forward_schedule_ : backward_schedule_;
      std::vector<double> buffer;
      for (auto const& color : schedule) {
        Index const nlevels = static_cast<Index>(color.level_ptr.size()) - 1;
        for (Index l = 0; l < nlevels; ++l) {
          Index const begin = color.level_ptr[l];
          Index const count = color.level_ptr[l + 1] - begin;
          Index const* rows = color.rows.data() + begin;
          if (color.independent) {
            parallel_for(spec_.workers, 0, count, [&](Index k) {
              Index const i = rows[k];
              relax(i, plain, x.data() + static_cast<std::size_t>(i) * bs);
            });
            continue;
          }
          buffer.resize(static_cast<std::size_t>(count) * bs);
          parallel_for(spec_.workers, 0, count, [&](Index k) {
            relax(rows[k], plain, buffer.data() + static_cast<std::size_t>(k) * bs);
          });
          parallel_for(spec_.workers, 0, count, [&](Index k) {
            std::copy_n(buffer.data() + static_cast<std::size_t>(k) * bs, bs,
                        x.data() + static_cast<std::size_t>(rows[k]) * bs);
          });
        }
      }
      return;
    }
  }
}

// -- free functions ----------------------------------------------------------

void gs_sweep(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
              SweepDirection direction) {
  GaussSeidel(a, {.kind = SmootherKind::kClassicGs}).sweep(a, b, x, direction);
}

void gs_sweep(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
              SweepDirection direction) {
  GaussSeidel(a, {.kind = SmootherKind::kClassicGs}).sweep(a, b, x, direction);
}

void pgs_no_sweep(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
                  int workers, SweepDirection direction) {
  GaussSeidel(a, {.kind = SmootherKind::kPgsNo, .workers = workers})
      .sweep(a, b, x, direction);
}

void pgs_no_sweep(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
                  int workers, SweepDirection direction) {
  GaussSeidel(a, {.kind = SmootherKind::kPgsNo, .workers = workers})
      .sweep(a, b, x, direction);
}

void pgs_scm_sweep(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
                   ColorPartition const& partition, int workers, SweepDirection direction,
                   SameColorRule rule) {
  GaussSeidel(a, {.kind = SmootherKind::kPgsScm,
                  .partition = borrow(partition),
                  .same_color = rule,
                  .workers = workers})
      .sweep(a, b, x, direction);
}

void pgs_scm_sweep(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
                   ColorPartition const& partition, int workers, SweepDirection direction,
                   SameColorRule rule) {
  GaussSeidel(a, {.kind = SmootherKind::kPgsScm,
                  .partition = borrow(partition),
                  .same_color = rule,
                  .workers = workers})
      .sweep(a, b, x, direction);
}

void smooth(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
            SmootherSpec const& spec) {
  GaussSeidel(a, spec).apply(a, b, x);
}

void smooth(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
            SmootherSpec const& spec) {
  GaussSeidel(a, spec).apply(a, b, x);
}

}  // namespace ascpr
