#include "ascpr/amg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ascpr/parallel.hpp"

namespace ascpr {

namespace {

bool is_symmetric(CsrMatrix const& a) {
  if (!a.square()) return false;
  for (Index i = 0; i < a.rows(); ++i) {
    auto const cols = a.row_cols(i);
    auto const vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      double const t = a.at(cols[k], i);
      if (std::abs(vals[k] - t) > 1e-12 * std::max(std::abs(vals[k]), std::abs(t)))
        return false;
    }
    if (a.at(i, i) <= 0.0) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<Index>> AggregationMap::members() const {
  std::vector<std::vector<Index>> m(n_aggregates);
  for (Index i = 0; i < static_cast<Index>(aggregate_of.size()); ++i)
    m[aggregate_of[i]].push_back(i);
  return m;
}

AggregationMap pairwise_aggregate(CsrMatrix const& a, double theta) {
  if (!a.square()) throw DimensionError("aggregation needs a square matrix");
  StrongConnections const s = symmetrize(strong_connections(a, theta));
  Index const n = a.rows();

  AggregationMap agg;
  agg.aggregate_of.assign(n, -1);
  for (Index i = 0; i < n; ++i) {
    if (agg.aggregate_of[i] >= 0) continue;
    Index best = -1;
    double best_weight = -1.0;
    for (Index j : s.neighbors(i)) {
      if (agg.aggregate_of[j] >= 0) continue;
      double const w = std::abs(a.at(i, j)) + std::abs(a.at(j, i));
      if (w > best_weight) {
        best_weight = w;
        best = j;
      }
    }
    agg.aggregate_of[i] = agg.n_aggregates;
    if (best >= 0) agg.aggregate_of[best] = agg.n_aggregates;
    ++agg.n_aggregates;
  }
  return agg;
}

CsrMatrix prolongation(AggregationMap const& agg) {
  Index const n = static_cast<Index>(agg.aggregate_of.size());
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1);
  for (Index i = 0; i <= n; ++i) row_ptr[i] = i;
  return CsrMatrix(n, agg.n_aggregates, std::move(row_ptr),
                   std::vector<Index>(agg.aggregate_of), std::vector<double>(n, 1.0));
}

CsrMatrix galerkin_product(CsrMatrix const& a, AggregationMap const& agg) {
  if (static_cast<Index>(agg.aggregate_of.size()) != a.rows() || !a.square())
    throw DimensionError("aggregation does not match the matrix");
  Index const nc = agg.n_aggregates;
  auto const members = agg.members();

  std::vector<Index> row_ptr(static_cast<std::size_t>(nc) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  std::vector<Index> slot(nc, -1);
  std::vector<double> acc(nc, 0.0);
  std::vector<Index> touched;
  for (Index I = 0; I < nc; ++I) {
    touched.clear();
    for (Index i : members[I]) {
      auto const cols = a.row_cols(i);
      auto const vals = a.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        Index const J = agg.aggregate_of[cols[k]];
        if (slot[J] < 0) {
          slot[J] = 1;
          acc[J] = 0.0;
          touched.push_back(J);
        }
        acc[J] += vals[k];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index J : touched) {
      col_idx.push_back(J);
      values.push_back(acc[J]);
      slot[J] = -1;
    }
    row_ptr[I + 1] = static_cast<Index>(col_idx.size());
  }
  return CsrMatrix(nc, nc, std::move(row_ptr), std::move(col_idx), std::move(values));
}

AmgHierarchy AmgHierarchy::build(CsrMatrix a, AmgParams const& params) {
  if (!a.square()) throw DimensionError("AMG needs a square matrix");
  if (params.coarsest_size < 1) throw InputError("coarsest_size must be positive");

  AmgHierarchy h;
  h.params_ = params;
  h.levels_.push_back(AmgLevel{.a = std::move(a)});
  while (h.levels_.back().a.rows() > params.coarsest_size &&
         static_cast<int>(h.levels_.size()) < params.max_levels) {
    AmgLevel& fine = h.levels_.back();
    Index const n = fine.a.rows();
    AggregationMap agg = pairwise_aggregate(fine.a, params.aggregation_theta);
    if (agg.n_aggregates > params.stall_ratio * n) break;
    CsrMatrix coarse = galerkin_product(fine.a, agg);
    fine.p = prolongation(agg);
    fine.members = agg.members();
    fine.aggregates = std::move(agg);
    h.levels_.push_back(AmgLevel{.a = std::move(coarse)});
  }

  for (std::size_t l = 0; l < h.levels_.size(); ++l) {
    AmgLevel& lev = h.levels_[l];
    lev.symmetric = is_symmetric(lev.a);
    if (l + 1 == h.levels_.size()) break;
    SmootherSpec spec{.kind = params.smoother,
                      .sweeps = 1,
                      .direction = SweepDirection::kForward,
                      .same_color = params.same_color,
                      .workers = params.workers};
    if (params.smoother == SmootherKind::kPgsScm) {
      lev.partition = std::make_shared<ColorPartition const>(
          color_matrix(lev.a, params.smoother_theta, params.workers));
      spec.partition = lev.partition;
    }
    lev.smoother = GaussSeidel(lev.a, std::move(spec));
  }

  CsrMatrix const& ac = h.levels_.back().a;
  Index const nc = ac.rows();
  std::vector<double> dense(static_cast<std::size_t>(nc) * nc, 0.0);
  for (Index i = 0; i < nc; ++i) {
    auto const cols = ac.row_cols(i);
    auto const vals = ac.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      dense[static_cast<std::size_t>(i) * nc + cols[k]] = vals[k];
  }
  try {
    h.coarse_ = dense::DenseLu(nc, std::move(dense));
  } catch (SingularError const&) {
    throw SingularError(fmt::format("AMG coarsest level ({} unknowns) is singular", nc),
                        0);
  }
  return h;
}

double AmgHierarchy::operator_complexity() const noexcept {
  if (levels_.empty() || levels_.front().a.nnz() == 0) return 0.0;
  double total = 0.0;
  for (auto const& l : levels_) total += l.a.nnz();
  return total / levels_.front().a.nnz();
}

double AmgHierarchy::grid_complexity() const noexcept {
  if (levels_.empty() || levels_.front().a.rows() == 0) return 0.0;
  double total = 0.0;
  for (auto const& l : levels_) total += l.a.rows();
  return total / levels_.front().a.rows();
}

void AmgHierarchy::cycle(std::span<double const> r, std::span<double> z,
                         CycleType type) const {
  if (r.size() != static_cast<std::size_t>(size()) || z.size() != r.size())
    throw DimensionError(fmt::format("AMG cycle: expected length {}, got {} and {}", size(),
                                     r.size(), z.size()));
  cycle_level(0, r, z, type);
}

void AmgHierarchy::cycle_level(std::size_t l, std::span<double const> r,
                               std::span<double> z, CycleType type) const {
  if (l + 1 == levels_.size()) {
    std::copy(r.begin(), r.end(), z.begin());
    coarse_.solve(z);
    return;
  }
  AmgLevel const& lev = levels_[l];
  int const workers = params_.workers;
  Index const n = lev.a.rows();
  Index const nc = lev.aggregates.n_aggregates;

  std::fill(z.begin(), z.end(), 0.0);
  for (int s = 0; s < params_.pre_sweeps; ++s)
    lev.smoother.sweep(lev.a, r, z, SweepDirection::kForward);

  Vector res(n);
  residual(lev.a, r, z, res, workers);
  Vector rc(nc);
  Vector ec(nc);
  parallel_for(workers, 0, nc, [&](Index I) {
    double s = 0.0;
    for (Index i : lev.members[I]) s += res[i];
    rc[I] = s;
  });

  if (type == CycleType::kK && l + 2 < levels_.size())
    krylov_correction(l + 1, rc, ec, type);
  else
    cycle_level(l + 1, rc, ec, type);

  auto const& agg = lev.aggregates.aggregate_of;
  parallel_for(workers, 0, n, [&](Index i) { z[i] += ec[agg[i]]; });
  for (int s = 0; s < params_.post_sweeps; ++s)
    lev.smoother.sweep(lev.a, r, z, SweepDirection::kBackward);
}

// Two flexible Krylov steps on level l, preconditioned by the cycle on l.
void AmgHierarchy::krylov_correction(std::size_t l, std::span<double const> r,
                                     std::span<double> z, CycleType type) const {
  AmgLevel const& lev = levels_[l];
  int const workers = params_.workers;
  std::size_t const n = r.size();
  Vector c1(n), v1(n), c2(n), v2(n), r2(n);

  cycle_level(l, r, c1, type);
  spmv(lev.a, c1, v1, workers);

  if (lev.symmetric) {
    double const rho1 = dot(c1, v1, workers);
    double const alpha1 = dot(c1, r, workers);
    if (!(rho1 > 0.0)) {
      std::copy(c1.begin(), c1.end(), z.begin());
      return;
    }
    double const t1 = alpha1 / rho1;
    for (std::size_t i = 0; i < n; ++i) r2[i] = r[i] - t1 * v1[i];
    cycle_level(l, r2, c2, type);
    spmv(lev.a, c2, v2, workers);
    double const gamma = dot(c2, v1, workers);
    double const beta = dot(c2, v2, workers);
    double const alpha2 = dot(c2, r2, workers);
    double const rho2 = beta - gamma * gamma / rho1;
    if (!(rho2 > 0.0)) {
      for (std::size_t i = 0; i < n; ++i) z[i] = t1 * c1[i];
      return;
    }
    double const t2 = alpha2 / rho2;
    double const s1 = t1 - gamma * t2 / rho1;
    for (std::size_t i = 0; i < n; ++i) z[i] = s1 * c1[i] + t2 * c2[i];
    return;
  }

  // Minimal residual over span{c1, c2} via modified Gram-Schmidt on A c.
  double const h11 = norm2(v1, workers);
  if (!(h11 > 0.0)) {
    std::copy(c1.begin(), c1.end(), z.begin());
    return;
  }
  for (std::size_t i = 0; i < n; ++i) v1[i] /= h11;
  double const g1 = dot(v1, r, workers);
  for (std::size_t i = 0; i < n; ++i) r2[i] = r[i] - g1 * v1[i];
  cycle_level(l, r2, c2, type);
  spmv(lev.a, c2, v2, workers);
  double const h12 = dot(v1, v2, workers);
  for (std::size_t i = 0; i < n; ++i) v2[i] -= h12 * v1[i];
  double const h22 = norm2(v2, workers);
  double y2 = 0.0;
  if (h22 > 1e-14 * h11) y2 = dot(v2, r, workers) / (h22 * h22);
  double const y1 = (g1 - h12 * y2) / h11;
  for (std::size_t i = 0; i < n; ++i) z[i] = y1 * c1[i] + y2 * c2[i];
}

Vector amg_cycle(AmgHierarchy const& h, std::span<double const> r, CycleType type) {
  Vector z(r.size());
  h.cycle(r, z, type);
  return z;
}

}  // namespace ascpr
