#pragma once

/// @file config.hpp
/// @brief Run configuration read from JSON or a TOML subset.
///
/// Recognised keys (top level, or the listed tables):
///
///     theta, mu, workers          number or list of numbers
///     m, tol, MaxIt               GMRES restart length, tolerance, cycles
///     cycle                       "V" or "K"
///     coarsest_size, sweeps, amg_theta
///     smoother_kind               "pgs-scm", "pgs-no" or "gs"
///     iteration_measure           "inner" or "restarts"
///     [problem] nx ny nz nsteps drift seed ... or manifest = "path"
///
/// The TOML reader understands comments, `[table]` headers, and values that
/// are numbers, booleans, quoted strings or flat arrays of those.

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ascpr/cpr.hpp"
#include "ascpr/harness/generator.hpp"

namespace ascpr::harness {

struct RunConfig {
  std::vector<double> theta{0.0};
  std::vector<int> mu{0};
  std::vector<int> workers{1};
  GmresParams gmres;
  CycleType cycle = CycleType::kK;
  Index coarsest_size = 200;
  int sweeps = 1;
  double amg_theta = 0.05;
  SmootherKind smoother_kind = SmootherKind::kPgsScm;
  IterationMeasure measure = IterationMeasure::kInner;
  GeneratorParams problem;
  std::optional<std::filesystem::path> manifest;
};

/// Throws ParseError with the offending line.
nlohmann::json parse_toml_subset(std::string_view text);

/// Throws InputError on unknown keys or out-of-range values.
RunConfig config_from_json(nlohmann::json const& j);

/// `.json` files are read as JSON, anything else as the TOML subset.
/// Relative manifest paths are resolved against the config's directory.
RunConfig load_config(std::filesystem::path const& path);

/// Solver parameters of one benchmark cell.
SequenceParams sequence_params(RunConfig const& config, double theta, int mu, int workers);

}  // namespace ascpr::harness
