#pragma once

/// @file cli.hpp
/// @brief Entry point of the `ascpr` command line tool.
///
///     ascpr generate [--config F] [--out DIR] [--seed S]
///     ascpr solve    (--matrix A.mtx [--rhs b.mtx] [--block-size B] | --config F)
///                    [--out DIR] [--workers W] [--theta T] [--mu M] [--seed S]
///     ascpr bench    [--config F] [--out DIR] [--workers W,..] [--theta T,..] [--mu M,..]
///     ascpr verify   --matrix A.mtx [--block-size B] [--theta T]
///
/// Exit codes: 0 success, 1 solver failure (divergence, no convergence,
/// singular factorisation, failed check), 2 bad input or usage.

#include <iosfwd>

namespace ascpr::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitBadInput = 2;

int cli_main(int argc, char const* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, char const* const* argv);

}  // namespace ascpr::harness
