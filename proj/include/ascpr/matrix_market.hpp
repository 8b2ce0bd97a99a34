#pragma once

/// @file matrix_market.hpp
/// @brief MatrixMarket coordinate I/O (real, general or symmetric).
///
/// Block matrices travel as the expanded scalar system plus a comment line
/// `% block_size: b` directly after the banner. Dense vectors use the
/// MatrixMarket `array` format.

#include <filesystem>
#include <iosfwd>

#include "ascpr/sparse.hpp"

namespace ascpr {

struct MatrixMarketContent {
  CsrMatrix matrix;
  int block_size = 1;  ///< From the `% block_size:` sidecar line, 1 if absent.
};

/// Parses a coordinate file. Errors (ParseError) carry the offending line.
MatrixMarketContent read_matrix_market(std::istream& in);
MatrixMarketContent read_matrix_market(std::filesystem::path const& path);

/// Reads a matrix and groups it by its declared block size.
BlockCsrMatrix read_block_matrix_market(std::filesystem::path const& path);

/// Writes `general` coordinate format with round-trip precision.
void write_matrix_market(std::ostream& out, CsrMatrix const& a, int block_size = 1);
void write_matrix_market(std::filesystem::path const& path, CsrMatrix const& a,
                         int block_size = 1);
void write_matrix_market(std::filesystem::path const& path, BlockCsrMatrix const& a);

Vector read_vector(std::istream& in);
Vector read_vector(std::filesystem::path const& path);
void write_vector(std::ostream& out, std::span<double const> v);
void write_vector(std::filesystem::path const& path, std::span<double const> v);

}  // namespace ascpr
