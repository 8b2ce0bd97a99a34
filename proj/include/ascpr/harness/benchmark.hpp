#pragma once

/// @file benchmark.hpp
/// @brief Runs the solver over a (theta, mu, workers) grid and derives the
/// setup-ratio and speedup metrics.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ascpr/harness/config.hpp"
#include "ascpr/harness/generator.hpp"

namespace ascpr::harness {

/// One grid cell. Times are wall-clock seconds of the solver only (problem
/// generation and I/O excluded).
struct BenchRow {
  double theta = 0.0;
  int mu = 0;
  int workers = 1;
  int systems = 0;
  int setup_calls = 0;
  double setup_ratio = 0.0;  ///< setup_time / time
  long iter = 0;             ///< sum of the per-system counters that feed mu
  long inner = 0;
  long restarts = 0;
  double time = 0.0;  ///< whole sequence
  double setup_time = 0.0;
  double solve_time = 0.0;
  double overhead_time = 0.0;  ///< time - setup_time - solve_time
  double speedup = 0.0;        ///< T(theta, mu, 1) / T(theta, mu, workers)
  double speedup_star = 0.0;   ///< T(theta, 0, 1) / T(theta, mu, workers)
  bool converged = false;
  std::string error;  ///< empty unless the cell threw

  friend bool operator==(BenchRow const&, BenchRow const&) = default;
};

struct RunReport {
  std::vector<BenchRow> rows;
  nlohmann::json problem;  ///< provenance of the sequence
};

/// Cells run one after another in (theta, mu, workers) order. workers = 1
/// and mu = 0 are added to the grid when missing since every speedup is
/// measured against them. A cell that throws is recorded with its message
/// and the run continues.
RunReport run_benchmark(RunConfig const& config, ProblemSequence const& seq);

/// Level sizes, nnz and colors of the AMG hierarchy built for the first
/// system of `seq` at each theta of the config.
nlohmann::json hierarchy_summary(RunConfig const& config, ProblemSequence const& seq);
nlohmann::json hierarchy_summary(AmgHierarchy const& h);

}  // namespace ascpr::harness
