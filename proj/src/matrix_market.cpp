#include "ascpr/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace ascpr {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(std::string const& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

struct Banner {
  std::string format;
  bool symmetric = false;
};

Banner parse_banner(std::string const& line, std::int64_t lineno) {
  std::istringstream ss(line);
  std::string tag, object, format, field, symmetry;
  ss >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", lineno);
  object = lowercase(object);
  format = lowercase(format);
  field = lowercase(field);
  symmetry = lowercase(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
  if (format != "coordinate" && format != "array")
    throw ParseError("unsupported format '" + format + "'", lineno);
  if (field != "real" && field != "double")
    throw ParseError("unsupported field '" + field + "' (real only)", lineno);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);
  return {format, symmetry == "symmetric"};
}

// Reads the next non-comment line. Comment lines are passed to `on_comment`.
template <class OnComment>
bool next_data_line(std::istream& in, std::string& line, std::int64_t& lineno,
                    OnComment&& on_comment) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') {
      on_comment(line, lineno);
      continue;
    }
    if (blank(line)) continue;
    return true;
  }
  return false;
}

bool only_whitespace_left(std::istringstream& ss) {
  ss >> std::ws;
  return ss.eof();
}

}  // namespace

MatrixMarketContent read_matrix_market(std::istream& in) {
  std::string line;
  std::int64_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  Banner const banner = parse_banner(line, lineno);
  if (banner.format != "coordinate")
    throw ParseError("expected coordinate format for a sparse matrix", lineno);

  int block_size = 1;
  auto on_comment = [&](std::string const& c, std::int64_t at) {
    auto const pos = c.find("block_size:");
    if (pos == std::string::npos) return;
    std::istringstream ss(c.substr(pos + 11));
    if (!(ss >> block_size) || block_size < 1)
      throw ParseError("invalid block_size comment", at);
  };

  if (!next_data_line(in, line, lineno, on_comment))
    throw ParseError("missing size line", lineno + 1);
  std::int64_t m = 0, n = 0, declared = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> m >> n >> declared) || !only_whitespace_left(ss) || m < 0 || n < 0 ||
        declared < 0)
      throw ParseError("malformed size line", lineno);
  }
  if (banner.symmetric && m != n) throw ParseError("symmetric matrix must be square", lineno);

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(banner.symmetric ? 2 * declared : declared));
  std::vector<std::int64_t> origin;  // source line of each triplet
  origin.reserve(entries.capacity());
  std::int64_t count = 0;
  while (next_data_line(in, line, lineno, on_comment)) {
    if (count == declared)
      throw ParseError(fmt::format("more entries than the declared {}", declared), lineno);
    std::istringstream ss(line);
    std::int64_t i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v) || !only_whitespace_left(ss))
      throw ParseError("malformed entry", lineno);
    if (i < 1 || i > m || j < 1 || j > n)
      throw ParseError(fmt::format("index ({}, {}) outside {}x{}", i, j, m, n), lineno);
    entries.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
    origin.push_back(lineno);
    if (banner.symmetric && i != j) {
      entries.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
      origin.push_back(lineno);
    }
    ++count;
  }
  if (count != declared)
    throw ParseError(
        fmt::format("file declares {} entries but contains {}", declared, count), lineno + 1);

  // Detect duplicates ourselves so the message can name the line.
  std::vector<std::size_t> order(entries.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].row != entries[b].row ? entries[a].row < entries[b].row
                                            : entries[a].col < entries[b].col;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    auto const& prev = entries[order[k - 1]];
    auto const& cur = entries[order[k]];
    if (prev.row == cur.row && prev.col == cur.col)
      throw ParseError(fmt::format("duplicate entry ({}, {})", cur.row + 1, cur.col + 1),
                       std::max(origin[order[k - 1]], origin[order[k]]));
  }

  MatrixMarketContent out;
  out.matrix = CsrMatrix::from_triplets(static_cast<Index>(m), static_cast<Index>(n),
                                        std::move(entries), Duplicates::kReject);
  out.block_size = block_size;
  return out;
}

MatrixMarketContent read_matrix_market(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return read_matrix_market(in);
  } catch (ParseError const& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

BlockCsrMatrix read_block_matrix_market(std::filesystem::path const& path) {
  auto content = read_matrix_market(path);
  return BlockCsrMatrix::from_scalar(content.matrix, content.block_size);
}

void write_matrix_market(std::ostream& out, CsrMatrix const& a, int block_size) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  if (block_size > 1) out << "% block_size: " << block_size << '\n';
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    auto const cols = a.row_cols(i);
    auto const vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out << fmt::format("{} {} {:.17g}\n", i + 1, cols[k] + 1, vals[k]);
  }
}

void write_matrix_market(std::filesystem::path const& path, CsrMatrix const& a,
                         int block_size) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_matrix_market(out, a, block_size);
}

void write_matrix_market(std::filesystem::path const& path, BlockCsrMatrix const& a) {
  write_matrix_market(path, a.to_scalar(), a.block_size());
}

Vector read_vector(std::istream& in) {
  std::string line;
  std::int64_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  Banner const banner = parse_banner(line, lineno);
  if (banner.format != "array") throw ParseError("expected array format for a vector", lineno);
  auto ignore = [](std::string const&, std::int64_t) {};
  if (!next_data_line(in, line, lineno, ignore)) throw ParseError("missing size line", lineno + 1);
  std::int64_t m = 0, n = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> m >> n) || !only_whitespace_left(ss) || m < 0 || n != 1)
      throw ParseError("malformed vector size line (expected 'm 1')", lineno);
  }
  Vector v;
  v.reserve(static_cast<std::size_t>(m));
  while (next_data_line(in, line, lineno, ignore)) {
    if (static_cast<std::int64_t>(v.size()) == m)
      throw ParseError("more values than declared", lineno);
    std::istringstream ss(line);
    double x = 0.0;
    if (!(ss >> x) || !only_whitespace_left(ss)) throw ParseError("malformed value", lineno);
    v.push_back(x);
  }
  if (static_cast<std::int64_t>(v.size()) != m)
    throw ParseError(fmt::format("file declares {} values but contains {}", m, v.size()),
                     lineno + 1);
  return v;
}

Vector read_vector(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_vector(in);
}

void write_vector(std::ostream& out, std::span<double const> v) {
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  for (double x : v) out << fmt::format("{:.17g}\n", x);
}

void write_vector(std::filesystem::path const& path, std::span<double const> v) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_vector(out, v);
}

}  // namespace ascpr
