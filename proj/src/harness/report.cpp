#include "ascpr/harness/report.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace ascpr::harness {

using nlohmann::json;

namespace {

std::string real(double v) { return fmt::format("{:.17g}", v); }

std::string quote(std::string const& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

std::vector<std::string> split_csv(std::string const& line, std::int64_t lineno) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char const c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", lineno);
  return out;
}

double parse_real(std::string const& s, std::int64_t lineno) {
  char* end = nullptr;
  double const v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError(fmt::format("invalid number '{}'", s), lineno);
  return v;
}

long parse_int(std::string const& s, std::int64_t lineno) {
  char* end = nullptr;
  long const v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError(fmt::format("invalid integer '{}'", s), lineno);
  return v;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double real_or_nan(json const& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::vector<std::string> const& report_columns() {
  static std::vector<std::string> const cols{
      "theta",     "mu",        "workers",  "systems",      "SetupCalls", "SetupRatio",
      "Iter",      "Inner",     "Restarts", "Time",         "SetupTime",  "SolveTime",
      "Overhead",  "Speedup",   "SpeedupStar", "converged", "error"};
  return cols;
}

void write_report_csv(std::ostream& out, RunReport const& report) {
  out << "schema=" << kReportSchema << '\n';
  auto const& cols = report_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (auto const& r : report.rows) {
    out << real(r.theta) << ',' << r.mu << ',' << r.workers << ',' << r.systems << ','
        << r.setup_calls << ',' << real(r.setup_ratio) << ',' << r.iter << ',' << r.inner << ','
        << r.restarts << ',' << real(r.time) << ',' << real(r.setup_time) << ','
        << real(r.solve_time) << ',' << real(r.overhead_time) << ',' << real(r.speedup) << ','
        << real(r.speedup_star) << ',' << (r.converged ? 1 : 0) << ',' << quote(r.error) << '\n';
  }
}

std::vector<BenchRow> read_report_csv(std::istream& in) {
  std::string line;
  std::int64_t lineno = 1;
  if (!std::getline(in, line) || line != fmt::format("schema={}", kReportSchema))
    throw ParseError(fmt::format("expected 'schema={}'", kReportSchema), lineno);
  ++lineno;
  if (!std::getline(in, line)) throw ParseError("missing header", lineno);
  if (split_csv(line, lineno) != report_columns()) throw ParseError("unexpected columns", lineno);

  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto const f = split_csv(line, lineno);
    if (f.size() != report_columns().size())
      throw ParseError(fmt::format("expected {} fields, found {}", report_columns().size(),
                                   f.size()),
                       lineno);
    BenchRow r;
    r.theta = parse_real(f[0], lineno);
    r.mu = static_cast<int>(parse_int(f[1], lineno));
    r.workers = static_cast<int>(parse_int(f[2], lineno));
    r.systems = static_cast<int>(parse_int(f[3], lineno));
    r.setup_calls = static_cast<int>(parse_int(f[4], lineno));
    r.setup_ratio = parse_real(f[5], lineno);
    r.iter = parse_int(f[6], lineno);
    r.inner = parse_int(f[7], lineno);
    r.restarts = parse_int(f[8], lineno);
    r.time = parse_real(f[9], lineno);
    r.setup_time = parse_real(f[10], lineno);
    r.solve_time = parse_real(f[11], lineno);
    r.overhead_time = parse_real(f[12], lineno);
    r.speedup = parse_real(f[13], lineno);
    r.speedup_star = parse_real(f[14], lineno);
    r.converged = parse_int(f[15], lineno) != 0;
    r.error = f[16];
    rows.push_back(std::move(r));
  }
  return rows;
}

json report_json(RunReport const& report) {
  json rows = json::array();
  for (auto const& r : report.rows) {
    rows.push_back({{"theta", r.theta},
                    {"mu", r.mu},
                    {"workers", r.workers},
                    {"systems", r.systems},
                    {"SetupCalls", r.setup_calls},
                    {"SetupRatio", number_or_null(r.setup_ratio)},
                    {"Iter", r.iter},
                    {"Inner", r.inner},
                    {"Restarts", r.restarts},
                    {"Time", number_or_null(r.time)},
                    {"SetupTime", number_or_null(r.setup_time)},
                    {"SolveTime", number_or_null(r.solve_time)},
                    {"Overhead", number_or_null(r.overhead_time)},
                    {"Speedup", number_or_null(r.speedup)},
                    {"SpeedupStar", number_or_null(r.speedup_star)},
                    {"converged", r.converged},
                    {"error", r.error}});
  }
  return {{"schema", kReportSchema},
          {"time_unit", "seconds"},
          {"time_scope", "solver only: preconditioner setup and GMRES, excluding I/O"},
          {"problem", report.problem},
          {"rows", std::move(rows)}};
}

std::vector<BenchRow> rows_from_json(json const& j) {
  if (j.value("schema", 0) != kReportSchema) throw InputError("unsupported report schema");
  std::vector<BenchRow> rows;
  try {
    for (auto const& x : j.at("rows")) {
      BenchRow r;
      r.theta = x.at("theta").get<double>();
      r.mu = x.at("mu").get<int>();
      r.workers = x.at("workers").get<int>();
      r.systems = x.at("systems").get<int>();
      r.setup_calls = x.at("SetupCalls").get<int>();
      r.setup_ratio = real_or_nan(x.at("SetupRatio"));
      r.iter = x.at("Iter").get<long>();
      r.inner = x.at("Inner").get<long>();
      r.restarts = x.at("Restarts").get<long>();
      r.time = real_or_nan(x.at("Time"));
      r.setup_time = real_or_nan(x.at("SetupTime"));
      r.solve_time = real_or_nan(x.at("SolveTime"));
      r.overhead_time = real_or_nan(x.at("Overhead"));
      r.speedup = real_or_nan(x.at("Speedup"));
      r.speedup_star = real_or_nan(x.at("SpeedupStar"));
      r.converged = x.at("converged").get<bool>();
      r.error = x.at("error").get<std::string>();
      rows.push_back(std::move(r));
    }
  } catch (json::exception const& e) {
    throw InputError(fmt::format("malformed report: {}", e.what()));
  }
  return rows;
}

void write_report_files(std::filesystem::path const& dir, RunReport const& report,
                        json const& hierarchy) {
  std::filesystem::create_directories(dir);
  auto open = [](std::filesystem::path const& p) {
    std::ofstream f(p);
    if (!f) throw InputError(fmt::format("cannot write {}", p.string()));
    return f;
  };
  {
    auto f = open(dir / "report.csv");
    write_report_csv(f, report);
  }
  {
    auto f = open(dir / "report.json");
    f << report_json(report).dump(2) << '\n';
  }
  if (!hierarchy.is_null()) {
    auto f = open(dir / "hierarchy.json");
    f << hierarchy.dump(2) << '\n';
  }
}

}  // namespace ascpr::harness
