#include "ascpr/cpr.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

namespace ascpr {

PressureProjector::PressureProjector(Index cells, int block_size)
    : cells_(cells), block_(block_size) {
  if (cells < 0 || block_size < 1) throw InputError("invalid pressure projector shape");
  indices_.resize(cells);
  for (Index i = 0; i < cells; ++i) indices_[i] = i * block_size;
}

void PressureProjector::restrict_to(std::span<double const> r, std::span<double> rp) const {
  if (r.size() != static_cast<std::size_t>(fine_size()) ||
      rp.size() != static_cast<std::size_t>(cells_))
    throw DimensionError("pressure restriction: length mismatch");
  for (Index i = 0; i < cells_; ++i) rp[i] = r[indices_[i]];
}

void PressureProjector::prolong(std::span<double const> xp, std::span<double> x) const {
  if (x.size() != static_cast<std::size_t>(fine_size()) ||
      xp.size() != static_cast<std::size_t>(cells_))
    throw DimensionError("pressure prolongation: length mismatch");
  std::fill(x.begin(), x.end(), 0.0);
  for (Index i = 0; i < cells_; ++i) x[indices_[i]] = xp[i];
}

CsrMatrix pressure_matrix(BlockCsrMatrix const& a) {
  std::vector<double> values(a.nnz_blocks());
  for (Index k = 0; k < a.nnz_blocks(); ++k) values[k] = a.block(k)[0];
  return CsrMatrix(a.block_rows(), a.block_cols(),
                   std::vector<Index>(a.row_ptr().begin(), a.row_ptr().end()),
                   std::vector<Index>(a.col_idx().begin(), a.col_idx().end()),
                   std::move(values));
}

CprPreconditioner CprPreconditioner::build(BlockCsrMatrix a, CprParams const& params) {
  if (a.block_rows() != a.block_cols()) throw DimensionError("CPR needs a square matrix");
  CprPreconditioner b;
  b.workers_ = std::max(1, params.workers);
  b.projector_ = PressureProjector(a.block_rows(), a.block_size());
  AmgParams amg = params.amg;
  amg.workers = b.workers_;
  b.amg_ = AmgHierarchy::build(pressure_matrix(a), amg);
  b.ilu_ = bilu0_factorize(a, params.ilu);
  b.fingerprint_ = ascpr::fingerprint(a);
  b.a_ = std::move(a);
  return b;
}

void CprPreconditioner::apply(std::span<double const> r, std::span<double> z) const {
  std::size_t const n = static_cast<std::size_t>(a_.rows());
  if (r.size() != n || z.size() != n)
    throw DimensionError(fmt::format("CPR apply: expected length {}, got {} and {}", n,
                                     r.size(), z.size()));
  Index const np = projector_.pressure_size();
  Vector rp(np), zp(np);
  projector_.restrict_to(r, rp);
  amg_.cycle(rp, zp);
  projector_.prolong(zp, z);

  Vector r2(n), z2(n);
  residual(a_, r, z, r2, workers_);
  ilu_.apply(r2, z2, workers_);
  axpy(1.0, z2, z, workers_);
}

CprPreconditioner build_cpr(BlockCsrMatrix const& a, CprParams const& params) {
  return CprPreconditioner::build(a, params);
}

Vector apply_cpr(CprPreconditioner const& b, std::span<double const> r) {
  Vector z(r.size());
  b.apply(r, z);
  return z;
}

SetupDecision ascpr_decide(AscprCache const& cache, int k, BlockCsrMatrix const& a) {
  if (k < 1) throw InputError("system index k is 1-based");
  if (k > 1 && cache.prev && cache.prev_iters && *cache.prev_iters <= cache.mu &&
      cache.prev->fingerprint() == fingerprint(a))
    return SetupDecision::kReuse;
  return SetupDecision::kRebuild;
}

SequenceResult ascpr_gmres_sequence(std::span<LinearSystem const> systems,
                                    SequenceParams const& params) {
  if (systems.empty()) throw InputError("empty system sequence");
  if (params.mu < 0) throw InputError("mu must be non-negative");
  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::duration d) { return std::chrono::duration<double>(d).count(); };

  CprParams cpr = params.cpr;
  cpr.workers = std::max(1, params.workers);

  SequenceResult out;
  AscprCache cache;
  cache.mu = params.mu;
  auto const start = Clock::now();
  for (std::size_t s = 0; s < systems.size(); ++s) {
    LinearSystem const& sys = systems[s];
    int const k = static_cast<int>(s) + 1;
    SystemResult res;

    if (ascpr_decide(cache, k, sys.a) == SetupDecision::kRebuild) {
      auto const t0 = Clock::now();
      cache.prev = std::make_shared<CprPreconditioner const>(build_cpr(sys.a, cpr));
      res.setup_seconds = seconds(Clock::now() - t0);
      ++cache.setup_calls;
      res.rebuilt = true;
    }

    res.x.assign(sys.b.size(), 0.0);
    auto const t1 = Clock::now();
    res.gmres = gmres_solve(sys.a, sys.b, res.x, *cache.prev, params.gmres, cpr.workers);
    res.solve_seconds = seconds(Clock::now() - t1);
    res.iterations = params.measure == IterationMeasure::kInner ? res.gmres.inner_iterations
                                                                : res.gmres.restarts;
    cache.prev_iters = res.iterations;

    out.total_iterations += res.iterations;
    out.total_inner += res.gmres.inner_iterations;
    out.total_restarts += res.gmres.restarts;
    out.all_converged = out.all_converged && res.gmres.converged;
    out.setup_seconds += res.setup_seconds;
    out.solve_seconds += res.solve_seconds;
    out.systems.push_back(std::move(res));
  }
  out.total_seconds = seconds(Clock::now() - start);
  out.setup_calls = cache.setup_calls;
  return out;
}

}  // namespace ascpr
