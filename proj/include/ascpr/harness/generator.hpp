#pragma once

/// @file generator.hpp
/// @brief Synthetic three-unknown (P, Sw, So) cell-block systems on a
/// Cartesian grid, and on-disk sequences described by a manifest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ascpr/cpr.hpp"

namespace ascpr::harness {

struct GeneratorParams {
  Index nx = 32;
  Index ny = 32;
  Index nz = 4;
  int nsteps = 10;
  double drift = 0.01;   ///< relative size of the per-step coefficient change
  std::uint64_t seed = 1;
  double perm_sigma = 1.0;       ///< std-dev of log-permeability
  double vertical_ratio = 0.1;   ///< k_z / k_xy
  double compressibility = 1e-3; ///< pressure accumulation relative to the mean transmissibility sum
  double pore_volume = 1.0;      ///< saturation time term
  double coupling = 0.1;         ///< pressure/saturation cross-coupling strength
};

struct Provenance {
  std::string kind = "synthetic";  ///< "synthetic" or "manifest"
  GeneratorParams params;
  std::filesystem::path manifest;
  bool variable_dimensions = false;
};

struct ProblemSequence {
  std::vector<LinearSystem> systems;
  Provenance provenance;

  int block_size() const noexcept {
    return systems.empty() ? 0 : systems.front().a.block_size();
  }
};

/// 7-point stencil with 3x3 blocks per cell. Pressure rows carry
/// heterogeneous anisotropic diffusion with harmonic-mean transmissibilities,
/// saturation rows upwind convection plus an accumulation term. Each step
/// multiplies permeabilities and accumulation terms by (1 + drift * xi),
/// xi ~ N(0,1), so consecutive systems differ by O(drift). Right-hand sides
/// come from a fixed manufactured solution. Deterministic in the seed.
ProblemSequence generate_blackoil_like_sequence(GeneratorParams const& params);

/// Writes A_NNN.mtx / b_NNN.mtx and manifest.json into `dir`.
void save_sequence(ProblemSequence const& seq, std::filesystem::path const& dir);

/// Reads a manifest written by save_sequence (or by hand). Throws InputError
/// when block sizes differ, or dimensions differ without
/// "variable_dimensions": true.
ProblemSequence load_sequence(std::filesystem::path const& manifest);

}  // namespace ascpr::harness
