#pragma once

/// @file verify.hpp
/// @brief Property checks run by `ascpr verify` on a user-supplied matrix.

#include <string>
#include <vector>

#include "ascpr/sparse.hpp"

namespace ascpr::harness {

struct VerifyCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

/// Coloring conditions, PGS-SCM worker invariance, BILU(0) pattern
/// reconstruction and level-scheduled solve exactness, and the Galerkin
/// identity of the AMG hierarchy. Coloring and AMG act on the scalar
/// matrix when block_size is 1 and on the first-unknown (pressure) matrix
/// otherwise.
std::vector<VerifyCheck> verify_matrix(CsrMatrix const& a, int block_size, double theta);

}  // namespace ascpr::harness
