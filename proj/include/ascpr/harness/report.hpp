#pragma once

/// @file report.hpp
/// @brief CSV / JSON serialisation of benchmark reports.
///
/// CSV layout: a `schema=1` line, a header line, then one row per cell.
/// Reals are written with 17 significant digits so rows read back exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ascpr/harness/benchmark.hpp"

namespace ascpr::harness {

inline constexpr int kReportSchema = 1;

/// Column names in CSV order.
std::vector<std::string> const& report_columns();

void write_report_csv(std::ostream& out, RunReport const& report);
/// Throws ParseError on a schema or column mismatch.
std::vector<BenchRow> read_report_csv(std::istream& in);

nlohmann::json report_json(RunReport const& report);
std::vector<BenchRow> rows_from_json(nlohmann::json const& j);

/// Writes report.csv and report.json into `dir`, plus hierarchy.json when
/// `hierarchy` is not null.
void write_report_files(std::filesystem::path const& dir, RunReport const& report,
                        nlohmann::json const& hierarchy);

}  // namespace ascpr::harness
