#include "ascpr/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace ascpr::harness {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

class TomlLine {
 public:
  TomlLine(std::string_view text, std::int64_t line) : s_(text), line_(line) {}

  json value() {
    skip_space();
    if (pos_ >= s_.size()) fail("missing value");
    char const c = s_[pos_];
    if (c == '"') return string();
    if (c == '[') return array();
    return scalar();
  }

  void expect_end() {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] != '#')
      fail(fmt::format("unexpected text '{}'", s_.substr(pos_)));
  }

  [[noreturn]] void fail(std::string const& what) const { throw ParseError(what, line_); }

 private:
  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  json string() {
    std::string out;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        char const e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(fmt::format("unsupported escape '\\{}'", e));
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  json array() {
    json out = json::array();
    ++pos_;
    for (;;) {
      skip_space();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      if (s_[pos_] == '[') fail("nested arrays are not supported");
      out.push_back(value());
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      else if (pos_ >= s_.size() || s_[pos_] != ']') fail("expected ',' or ']' in array");
    }
  }

  json scalar() {
    std::size_t const start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    std::string_view const tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    bool const floating = tok.find_first_of(".eE") != std::string_view::npos ||
                          tok == "inf" || tok == "nan";
    if (!floating) {
      std::int64_t v = 0;
      auto const [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec == std::errc() && p == tok.data() + tok.size()) return v;
    } else {
      double v = 0.0;
      auto const [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec == std::errc() && p == tok.data() + tok.size()) return v;
    }
    fail(fmt::format("invalid value '{}'", tok));
  }

  std::string_view s_;
  std::int64_t line_;
  std::size_t pos_ = 0;
};

bool valid_key(std::string_view k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

template <class T>
std::vector<T> number_list(json const& v, std::string const& key) {
  std::vector<T> out;
  auto one = [&](json const& x) {
    if (!x.is_number()) throw InputError(fmt::format("config key '{}' must be numeric", key));
    if constexpr (std::is_integral_v<T>) {
      if (!x.is_number_integer())
        throw InputError(fmt::format("config key '{}' must be an integer", key));
    }
    out.push_back(x.get<T>());
  };
  if (v.is_array()) {
    for (auto const& x : v) one(x);
  } else {
    one(v);
  }
  if (out.empty()) throw InputError(fmt::format("config key '{}' is an empty list", key));
  return out;
}

template <class T>
T number(json const& v, std::string const& key) {
  if (v.is_array()) throw InputError(fmt::format("config key '{}' takes a single value", key));
  return number_list<T>(v, key).front();
}

std::string text(json const& v, std::string const& key) {
  if (!v.is_string()) throw InputError(fmt::format("config key '{}' must be a string", key));
  return v.get<std::string>();
}

void apply_problem(json const& p, RunConfig& c) {
  if (!p.is_object()) throw InputError("config 'problem' must be a table");
  GeneratorParams& g = c.problem;
  for (auto const& [key, v] : p.items()) {
    if (key == "nx") g.nx = number<Index>(v, key);
    else if (key == "ny") g.ny = number<Index>(v, key);
    else if (key == "nz") g.nz = number<Index>(v, key);
    else if (key == "nsteps") g.nsteps = number<int>(v, key);
    else if (key == "drift") g.drift = number<double>(v, key);
    else if (key == "seed") g.seed = number<std::uint64_t>(v, key);
    else if (key == "perm_sigma") g.perm_sigma = number<double>(v, key);
    else if (key == "vertical_ratio") g.vertical_ratio = number<double>(v, key);
    else if (key == "compressibility") g.compressibility = number<double>(v, key);
    else if (key == "pore_volume") g.pore_volume = number<double>(v, key);
    else if (key == "coupling") g.coupling = number<double>(v, key);
    else if (key == "manifest") c.manifest = text(v, key);
    else throw InputError(fmt::format("unknown config key 'problem.{}'", key));
  }
}

void apply_solver(json const& j, RunConfig& c) {
  for (auto const& [key, v] : j.items()) {
    if (key == "theta") c.theta = number_list<double>(v, key);
    else if (key == "mu") c.mu = number_list<int>(v, key);
    else if (key == "workers") c.workers = number_list<int>(v, key);
    else if (key == "m") c.gmres.restart = number<int>(v, key);
    else if (key == "tol") c.gmres.tol = number<double>(v, key);
    else if (key == "MaxIt") c.gmres.max_restarts = number<int>(v, key);
    else if (key == "coarsest_size") c.coarsest_size = number<Index>(v, key);
    else if (key == "sweeps") c.sweeps = number<int>(v, key);
    else if (key == "amg_theta") c.amg_theta = number<double>(v, key);
    else if (key == "cycle") {
      std::string const s = text(v, key);
      if (s == "V" || s == "v") c.cycle = CycleType::kV;
      else if (s == "K" || s == "k") c.cycle = CycleType::kK;
      else throw InputError(fmt::format("cycle must be \"V\" or \"K\", got \"{}\"", s));
    } else if (key == "smoother_kind") {
      std::string const s = text(v, key);
      if (s == "pgs-scm") c.smoother_kind = SmootherKind::kPgsScm;
      else if (s == "pgs-no") c.smoother_kind = SmootherKind::kPgsNo;
      else if (s == "gs") c.smoother_kind = SmootherKind::kClassicGs;
      else throw InputError(fmt::format("unknown smoother_kind \"{}\"", s));
    } else if (key == "iteration_measure") {
      std::string const s = text(v, key);
      if (s == "inner") c.measure = IterationMeasure::kInner;
      else if (s == "restarts") c.measure = IterationMeasure::kRestarts;
      else throw InputError(fmt::format("unknown iteration_measure \"{}\"", s));
    } else if (key == "problem") {
      apply_problem(v, c);
    } else if (key == "solver" || key == "bench") {
      if (!v.is_object()) throw InputError(fmt::format("config '{}' must be a table", key));
      apply_solver(v, c);
    } else {
      throw InputError(fmt::format("unknown config key '{}'", key));
    }
  }
}

void validate(RunConfig const& c) {
  for (double t : c.theta)
    if (!(t >= 0.0 && t <= 1.0)) throw InputError(fmt::format("theta {} outside [0, 1]", t));
  for (int m : c.mu)
    if (m < 0) throw InputError(fmt::format("mu {} is negative", m));
  for (int w : c.workers)
    if (w < 1) throw InputError(fmt::format("workers {} is below 1", w));
  if (c.gmres.restart < 1) throw InputError("m must be at least 1");
  if (!(c.gmres.tol > 0.0)) throw InputError("tol must be positive");
  if (c.gmres.max_restarts < 1) throw InputError("MaxIt must be at least 1");
  if (c.coarsest_size < 1) throw InputError("coarsest_size must be at least 1");
  if (c.sweeps < 0) throw InputError("sweeps must be non-negative");
  if (!(c.amg_theta >= 0.0 && c.amg_theta <= 1.0)) throw InputError("amg_theta outside [0, 1]");
}

}  // namespace

json parse_toml_subset(std::string_view text) {
  json root = json::object();
  json* table = &root;
  std::int64_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t const eol = std::min(text.find('\n', pos), text.size());
    std::string_view const raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    std::string_view const line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      std::size_t const close = line.find(']');
      if (close == std::string_view::npos) throw ParseError("unterminated table header", lineno);
      std::string const name(trim(line.substr(1, close - 1)));
      if (!valid_key(name)) throw ParseError(fmt::format("invalid table name '{}'", name), lineno);
      std::string_view const rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest.front() != '#')
        throw ParseError("unexpected text after table header", lineno);
      if (root.contains(name)) throw ParseError(fmt::format("table '{}' defined twice", name), lineno);
      root[name] = json::object();
      table = &root[name];
      continue;
    }

    std::size_t const eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", lineno);
    std::string const key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ParseError(fmt::format("invalid key '{}'", key), lineno);
    if (table->contains(key)) throw ParseError(fmt::format("duplicate key '{}'", key), lineno);
    TomlLine parser(line.substr(eq + 1), lineno);
    json v = parser.value();
    parser.expect_end();
    (*table)[key] = std::move(v);
  }
  return root;
}

RunConfig config_from_json(json const& j) {
  if (!j.is_object()) throw InputError("config must be an object");
  RunConfig c;
  apply_solver(j, c);
  validate(c);
  return c;
}

RunConfig load_config(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open config {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  std::string const content = ss.str();

  json j;
  try {
    if (path.extension() == ".json") {
      try {
        j = json::parse(content);
      } catch (json::parse_error const& e) {
        throw InputError(e.what());
      }
    } else {
      j = parse_toml_subset(content);
    }
  } catch (InputError const& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
  RunConfig c = config_from_json(j);
  if (c.manifest && c.manifest->is_relative()) c.manifest = path.parent_path() / *c.manifest;
  return c;
}

SequenceParams sequence_params(RunConfig const& config, double theta, int mu, int workers) {
  SequenceParams p;
  p.gmres = config.gmres;
  p.mu = mu;
  p.measure = config.measure;
  p.workers = workers;
  AmgParams& amg = p.cpr.amg;
  amg.coarsest_size = config.coarsest_size;
  amg.aggregation_theta = config.amg_theta;
  amg.smoother_theta = theta;
  amg.smoother = config.smoother_kind;
  amg.pre_sweeps = config.sweeps;
  amg.post_sweeps = config.sweeps;
  amg.cycle = config.cycle;
  amg.workers = workers;
  p.cpr.workers = workers;
  return p;
}

}  // namespace ascpr::harness
