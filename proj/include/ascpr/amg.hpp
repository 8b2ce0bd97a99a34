#pragma once

/// @file amg.hpp
/// @brief Unsmoothed-aggregation AMG with pairwise matching, used as the
/// pressure solver of the CPR preconditioner.
///
/// Each coarsening step pairs vertices (greedy matching over strong
/// connections), builds the piecewise-constant prolongation P and the
/// Galerkin operator P^T A P. The coarsest level is solved with dense LU.
/// Cycles: V(pre, post) or the K-cycle, where every coarse correction is
/// accelerated by two flexible Krylov steps (CG for symmetric levels,
/// minimal residual otherwise).

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "ascpr/coloring.hpp"
#include "ascpr/dense.hpp"
#include "ascpr/smoothers.hpp"
#include "ascpr/sparse.hpp"

namespace ascpr {

struct AggregationMap {
  std::vector<Index> aggregate_of;  ///< vertex -> aggregate id
  Index n_aggregates = 0;

  /// Members of every aggregate, ascending.
  std::vector<std::vector<Index>> members() const;
};

/// Visits vertices in ascending order; an unaggregated vertex is paired with
/// the unaggregated strong neighbour of largest |a_ij| + |a_ji| (lowest index
/// on ties), or left as a singleton.
AggregationMap pairwise_aggregate(CsrMatrix const& a, double theta);

/// n x n_aggregates matrix with one unit entry per row.
CsrMatrix prolongation(AggregationMap const& agg);

/// P^T A P for the piecewise-constant P of `agg`.
CsrMatrix galerkin_product(CsrMatrix const& a, AggregationMap const& agg);

enum class CycleType { kV, kK };

struct AmgParams {
  Index coarsest_size = 200;  ///< direct solve at or below this size
  int max_levels = 30;
  double aggregation_theta = 0.05;
  double smoother_theta = 0.0;
  SmootherKind smoother = SmootherKind::kPgsScm;
  SameColorRule same_color = SameColorRule::kOrdered;
  int pre_sweeps = 1;
  int post_sweeps = 1;
  CycleType cycle = CycleType::kK;
  double stall_ratio = 0.9;  ///< stop coarsening when n_c > stall_ratio * n
  int workers = 1;
};

struct AmgLevel {
  CsrMatrix a{};
  CsrMatrix p{};  ///< empty on the coarsest level
  AggregationMap aggregates{};
  std::vector<std::vector<Index>> members{};
  std::shared_ptr<ColorPartition const> partition{};
  GaussSeidel smoother{};
  bool symmetric = false;
};

class AmgHierarchy {
 public:
  AmgHierarchy() = default;

  /// Throws SingularError if the coarsest dense factorisation fails.
  static AmgHierarchy build(CsrMatrix a, AmgParams const& params);

  AmgParams const& params() const noexcept { return params_; }
  std::vector<AmgLevel> const& levels() const noexcept { return levels_; }
  Index size() const noexcept { return levels_.empty() ? 0 : levels_.front().a.rows(); }

  /// sum nnz(A_l) / nnz(A_0)
  double operator_complexity() const noexcept;
  /// sum n_l / n_0
  double grid_complexity() const noexcept;

  /// z ~= A^-1 r by one cycle from a zero initial guess.
  void cycle(std::span<double const> r, std::span<double> z, CycleType type) const;
  void cycle(std::span<double const> r, std::span<double> z) const {
    cycle(r, z, params_.cycle);
  }

 private:
  void cycle_level(std::size_t l, std::span<double const> r, std::span<double> z,
                   CycleType type) const;
  void krylov_correction(std::size_t l, std::span<double const> r, std::span<double> z,
                         CycleType type) const;

  AmgParams params_;
  std::vector<AmgLevel> levels_;
  dense::DenseLu coarse_;
};

inline AmgHierarchy build_hierarchy(CsrMatrix a, AmgParams const& params = {}) {
  return AmgHierarchy::build(std::move(a), params);
}

Vector amg_cycle(AmgHierarchy const& h, std::span<double const> r, CycleType type);

}  // namespace ascpr
