#pragma once

/// @file smoothers.hpp
/// @brief Gauss-Seidel sweeps: classic sequential, natural-ordering parallel
/// (PGS-NO) and multi-color parallel over a strong-connection partition
/// (PGS-SCM).
///
/// All kernels update x in place and accept scalar or block CSR matrices;
/// for blocks the diagonal block is solved by LU with partial pivoting.

#include <memory>
#include <span>
#include <vector>

#include "ascpr/coloring.hpp"
#include "ascpr/sparse.hpp"

namespace ascpr {

enum class SmootherKind { kClassicGs, kPgsNo, kPgsScm };
enum class SweepDirection { kForward, kBackward, kSymmetric };

/// How PGS-SCM treats couplings between rows of the same color, which only
/// exist through weak entries when theta > 0.
enum class SameColorRule {
  /// Same-color rows are level scheduled along the in-color order, so the
  /// sweep is exactly Gauss-Seidel of the color-permuted system.
  kOrdered,
  /// Same-color reads see x as it was when the color started (Jacobi on the
  /// dropped weak couplings, one barrier per color).
  kSnapshot,
};

struct SmootherSpec {
  SmootherKind kind = SmootherKind::kPgsScm;
  int sweeps = 1;
  SweepDirection direction = SweepDirection::kForward;
  std::shared_ptr<ColorPartition const> partition{};  ///< required for PGS-SCM
  SameColorRule same_color = SameColorRule::kOrdered;
  int workers = 1;
};

/// Gauss-Seidel smoother with the diagonal factorisations (and, for PGS-SCM,
/// the color schedule) precomputed for one matrix. The matrix itself is
/// passed to every sweep and must be the one used at construction.
class GaussSeidel {
 public:
  GaussSeidel() = default;

  /// Throws SingularError naming the first row whose diagonal (block) cannot
  /// be inverted, DimensionError if the partition does not match.
  GaussSeidel(CsrMatrix const& a, SmootherSpec spec);
  GaussSeidel(BlockCsrMatrix const& a, SmootherSpec spec);

  SmootherSpec const& spec() const noexcept { return spec_; }

  void sweep(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
             SweepDirection direction) const;
  void sweep(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
             SweepDirection direction) const;

  /// spec().sweeps sweeps in spec().direction.
  void apply(CsrMatrix const& a, std::span<double const> b, std::span<double> x) const;
  void apply(BlockCsrMatrix const& a, std::span<double const> b,
             std::span<double> x) const;

  struct ColorLevels {
    std::vector<Index> level_ptr;  ///< offsets into rows, one range per level
    std::vector<Index> rows;
    bool independent = true;       ///< no same-color coupling at all
  };

 private:
  struct View;
  void init(View const& a);
  void run(View const& a, std::span<double const> b, std::span<double> x,
           SweepDirection direction) const;
  void run_one(View const& a, std::span<double const> b, std::span<double> x,
               bool forward) const;

  SmootherSpec spec_;
  Index n_ = 0;
  int block_ = 1;
  std::vector<double> diag_;     // b == 1: diagonal values; b > 1: LU blocks
  std::vector<int> pivots_;      // b > 1 only
  std::vector<ColorLevels> forward_schedule_;
  std::vector<ColorLevels> backward_schedule_;
};

void gs_sweep(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
              SweepDirection direction = SweepDirection::kForward);
void gs_sweep(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
              SweepDirection direction = SweepDirection::kForward);

/// Rows split into `workers` contiguous chunks swept concurrently; reads
/// across chunk seams see whatever the neighbouring chunk has written so
/// far, so the result depends on the worker count and on timing.
void pgs_no_sweep(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
                  int workers, SweepDirection direction = SweepDirection::kForward);
void pgs_no_sweep(BlockCsrMatrix const& a, std::span<double const> b,
                  std::span<double> x, int workers,
                  SweepDirection direction = SweepDirection::kForward);

/// Colors in order, rows of one color in parallel, barrier between colors.
/// Bitwise independent of `workers`.
void pgs_scm_sweep(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
                   ColorPartition const& partition, int workers = 1,
                   SweepDirection direction = SweepDirection::kForward,
                   SameColorRule rule = SameColorRule::kOrdered);
void pgs_scm_sweep(BlockCsrMatrix const& a, std::span<double const> b,
                   std::span<double> x, ColorPartition const& partition,
                   int workers = 1, SweepDirection direction = SweepDirection::kForward,
                   SameColorRule rule = SameColorRule::kOrdered);

/// Runs spec.sweeps sweeps of spec.kind.
void smooth(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
            SmootherSpec const& spec);
void smooth(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
            SmootherSpec const& spec);

}  // namespace ascpr
