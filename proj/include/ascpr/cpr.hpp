#pragma once

/// @file cpr.hpp
/// @brief Two-stage CPR preconditioner, the adaptive setup-reuse policy and
/// the sequence driver that solves a run of Jacobian systems with GMRES.
///
/// Stage one solves the pressure block A_PP = Pi^T A Pi with one AMG cycle,
/// stage two relaxes the full residual with BILU(0):
///
///     z1 = Pi B_P Pi^T r,   z = z1 + R (r - A z1)
///
/// Pi picks the first unknown of every cell block.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ascpr/amg.hpp"
#include "ascpr/gmres.hpp"
#include "ascpr/ilu.hpp"
#include "ascpr/sparse.hpp"

namespace ascpr {

class PressureProjector {
 public:
  PressureProjector() = default;
  PressureProjector(Index cells, int block_size);

  Index fine_size() const noexcept { return cells_ * block_; }
  Index pressure_size() const noexcept { return cells_; }
  int block_size() const noexcept { return block_; }
  std::vector<Index> const& pressure_indices() const noexcept { return indices_; }

  /// rp = Pi^T r
  void restrict_to(std::span<double const> r, std::span<double> rp) const;
  /// x = Pi xp (non-pressure entries set to zero)
  void prolong(std::span<double const> xp, std::span<double> x) const;

 private:
  Index cells_ = 0;
  int block_ = 1;
  std::vector<Index> indices_;
};

/// Pi^T A Pi: entry (i, j) is element [0][0] of block (i, j), for every
/// stored block.
CsrMatrix pressure_matrix(BlockCsrMatrix const& a);

struct CprParams {
  AmgParams amg{};
  IluOptions ilu{};
  int workers = 1;  ///< overrides amg.workers
};

struct Fingerprint {
  Index rows = 0;
  Index nnz = 0;
  friend bool operator==(Fingerprint const&, Fingerprint const&) = default;
};

inline Fingerprint fingerprint(BlockCsrMatrix const& a) noexcept { return {a.rows(), a.nnz()}; }

class CprPreconditioner final : public Preconditioner {
 public:
  CprPreconditioner() = default;

  /// Keeps its own copy of A for the stage-two residual.
  static CprPreconditioner build(BlockCsrMatrix a, CprParams const& params);

  void apply(std::span<double const> r, std::span<double> z) const override;

  PressureProjector const& projector() const noexcept { return projector_; }
  AmgHierarchy const& pressure_solver() const noexcept { return amg_; }
  BiluFactors const& relaxation() const noexcept { return ilu_; }
  BlockCsrMatrix const& matrix() const noexcept { return a_; }
  Fingerprint const& fingerprint() const noexcept { return fingerprint_; }
  int workers() const noexcept { return workers_; }

 private:
  BlockCsrMatrix a_;
  PressureProjector projector_;
  AmgHierarchy amg_;
  BiluFactors ilu_;
  Fingerprint fingerprint_;
  int workers_ = 1;
};

CprPreconditioner build_cpr(BlockCsrMatrix const& a, CprParams const& params = {});
Vector apply_cpr(CprPreconditioner const& b, std::span<double const> r);

// -- adaptive setup ----------------------------------------------------------

struct AscprCache {
  std::shared_ptr<CprPreconditioner const> prev;
  std::optional<int> prev_iters;  ///< set whenever prev is
  int mu = 0;
  int setup_calls = 0;
};

enum class SetupDecision { kReuse, kRebuild };

/// k is 1-based. Reuse only when k > 1, a previous preconditioner exists,
/// its solve took at most mu iterations and A has the same fingerprint.
SetupDecision ascpr_decide(AscprCache const& cache, int k, BlockCsrMatrix const& a);

/// Which counter of a solve is compared against mu and summed into Iter.
enum class IterationMeasure { kInner, kRestarts };

struct LinearSystem {
  BlockCsrMatrix a;
  Vector b;
};

struct SequenceParams {
  CprParams cpr{};
  GmresParams gmres{};
  int mu = 0;
  IterationMeasure measure = IterationMeasure::kInner;
  int workers = 1;  ///< overrides cpr.workers
};

struct SystemResult {
  Vector x;
  GmresResult gmres;
  int iterations = 0;  ///< the counter selected by SequenceParams::measure
  bool rebuilt = false;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct SequenceResult {
  std::vector<SystemResult> systems;
  int setup_calls = 0;
  long total_iterations = 0;
  long total_inner = 0;
  long total_restarts = 0;
  bool all_converged = true;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Solves every system from a zero initial guess, reusing or rebuilding the
/// CPR preconditioner per ascpr_decide.
SequenceResult ascpr_gmres_sequence(std::span<LinearSystem const> systems,
                                    SequenceParams const& params);

}  // namespace ascpr
