#pragma once

/// @file ilu.hpp
/// @brief Block ILU(0) and level-scheduled triangular solves.

#include <span>
#include <string>
#include <vector>

#include "ascpr/sparse.hpp"

namespace ascpr {

enum class Triangle { kLower, kUpper };

/// Rows of a triangular factor grouped so that every in-pattern predecessor
/// of a row sits in a strictly earlier level.
struct LevelSchedule {
  std::vector<Index> level_ptr{0};
  std::vector<Index> rows;

  Index levels() const noexcept { return static_cast<Index>(level_ptr.size()) - 1; }
  std::span<Index const> level(Index l) const noexcept {
    return {rows.data() + level_ptr[l], static_cast<std::size_t>(level_ptr[l + 1] - level_ptr[l])};
  }
};

/// Longest-path layering of the dependency DAG of the lower (j < i) or upper
/// (j > i) part of a pattern. Entries on the other side of the diagonal are
/// ignored. Rows are ascending inside each level.
LevelSchedule level_schedule(Index n, std::span<Index const> row_ptr,
                             std::span<Index const> col_idx, Triangle part);
LevelSchedule level_schedule(CsrMatrix const& t, Triangle part);
LevelSchedule level_schedule(BlockCsrMatrix const& t, Triangle part);

struct IluOptions {
  /// On a singular pivot block, add perturbation * ||block||_F to its
  /// diagonal and continue (recording a warning) instead of throwing.
  bool perturb_singular_pivots = true;
  double perturbation = 1e-8;
};

/// ILU(0) factors stored in the pattern of A: the strictly lower blocks hold
/// L (unit diagonal implied), the rest hold U.
class BiluFactors {
 public:
  BiluFactors() = default;

  int block_size() const noexcept { return lu_.block_size(); }
  Index rows() const noexcept { return lu_.rows(); }

  /// L with its unit diagonal blocks made explicit.
  BlockCsrMatrix lower() const;
  BlockCsrMatrix upper() const;

  LevelSchedule const& lower_schedule() const noexcept { return lower_levels_; }
  LevelSchedule const& upper_schedule() const noexcept { return upper_levels_; }

  /// Block rows whose pivot was perturbed during factorisation.
  std::vector<Index> const& perturbed_rows() const noexcept { return perturbed_; }

  /// z = U^-1 L^-1 r, level-parallel. Bitwise equal to apply_sequential.
  void apply(std::span<double const> r, std::span<double> z, int workers = 1) const;
  void apply_sequential(std::span<double const> r, std::span<double> z) const;

 private:
  friend BiluFactors bilu0_factorize(BlockCsrMatrix const& a, IluOptions const& options);

  void forward_row(Index i, std::span<double const> r, std::span<double> y) const;
  void backward_row(Index i, std::span<double> z) const;

  BlockCsrMatrix lu_;
  std::vector<Index> diag_pos_;
  std::vector<double> diag_lu_;  // LU factors of each U_ii
  std::vector<int> diag_piv_;
  LevelSchedule lower_levels_;
  LevelSchedule upper_levels_;
  std::vector<Index> perturbed_;
};

/// Throws SingularError naming the row on an unrecoverable pivot.
BiluFactors bilu0_factorize(BlockCsrMatrix const& a, IluOptions const& options = {});
BiluFactors bilu0_factorize(CsrMatrix const& a, IluOptions const& options = {});

Vector bilu_apply(BiluFactors const& f, std::span<double const> r, int workers = 1);

}  // namespace ascpr
