#include "ascpr/harness/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ascpr/matrix_market.hpp"

namespace ascpr::harness {

namespace {

constexpr int kBlock = 3;
constexpr std::array<double, 2> kMobility{1.0, 0.6};
// Background potential gradient driving the saturation fluxes.
constexpr double kGradX = 1.0;
constexpr double kGradY = 0.5;
constexpr double kGradZ = 0.3;

struct Grid {
  Index nx, ny, nz;
  Index cells() const { return nx * ny * nz; }
  Index id(Index x, Index y, Index z) const { return x + nx * (y + ny * z); }
};

BlockCsrMatrix assemble(Grid const& g, GeneratorParams const& p, std::vector<double> const& perm,
                        std::vector<double> const& pv) {
  Index const n = g.cells();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * 7 * 9);
  auto add = [&](Index ci, int r, Index cj, int c, double v) {
    t.push_back({ci * kBlock + r, cj * kBlock + c, v});
  };

  std::vector<double> tsum(n, 0.0);
  auto face = [&](Index c, Index d, double factor, double dphi) {
    double const tr = factor * 2.0 * perm[c] * perm[d] / (perm[c] + perm[d]);
    tsum[c] += tr;
    tsum[d] += tr;
    add(c, 0, c, 0, tr);
    add(c, 0, d, 0, -tr);
    add(d, 0, d, 0, tr);
    add(d, 0, c, 0, -tr);

    double const flux = tr * dphi;  // c -> d when positive
    Index const up = flux >= 0.0 ? c : d;
    Index const down = flux >= 0.0 ? d : c;
    double const f = std::abs(flux);
    for (int s = 0; s < 2; ++s) {
      double const lf = kMobility[s] * f;
      add(up, s + 1, up, s + 1, lf);
      add(down, s + 1, up, s + 1, -lf);
      double const lt = p.coupling * kMobility[s] * tr;
      add(c, s + 1, c, 0, lt);
      add(c, s + 1, d, 0, -lt);
      add(d, s + 1, d, 0, lt);
      add(d, s + 1, c, 0, -lt);
      double const pf = p.coupling * (s == 0 ? 1.0 : -0.5) * f;
      add(up, 0, up, s + 1, pf);
      add(down, 0, up, s + 1, -pf);
    }
  };

  for (Index z = 0; z < g.nz; ++z)
    for (Index y = 0; y < g.ny; ++y)
      for (Index x = 0; x < g.nx; ++x) {
        Index const c = g.id(x, y, z);
        if (x + 1 < g.nx) face(c, g.id(x + 1, y, z), 1.0, kGradX);
        if (y + 1 < g.ny) face(c, g.id(x, y + 1, z), 1.0, kGradY);
        if (z + 1 < g.nz) face(c, g.id(x, y, z + 1), p.vertical_ratio, kGradZ);
      }

  double mean_tsum = 0.0;
  for (double v : tsum) mean_tsum += v;
  mean_tsum = n > 0 ? mean_tsum / n : 0.0;
  if (mean_tsum == 0.0) mean_tsum = 1.0;
  for (Index c = 0; c < n; ++c) {
    double const rel = pv[c] / p.pore_volume;
    add(c, 0, c, 0, p.compressibility * mean_tsum * rel);
    add(c, 1, c, 1, pv[c]);
    add(c, 2, c, 2, pv[c]);
    add(c, 0, c, 1, -p.coupling * 0.1 * pv[c]);
    add(c, 1, c, 2, p.coupling * 0.1 * pv[c]);
  }
  return BlockCsrMatrix::from_scalar(
      CsrMatrix::from_triplets(n * kBlock, n * kBlock, std::move(t)), kBlock);
}

}  // namespace

ProblemSequence generate_blackoil_like_sequence(GeneratorParams const& params) {
  if (params.nx < 1 || params.ny < 1 || params.nz < 1)
    throw InputError("grid dimensions must be at least 1");
  if (params.nsteps < 1) throw InputError("nsteps must be at least 1");
  if (params.drift < 0.0) throw InputError("drift must be non-negative");
  if (!(params.pore_volume > 0.0)) throw InputError("pore_volume must be positive");

  Grid const g{params.nx, params.ny, params.nz};
  Index const n = g.cells();
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<double> perm(n), pv(n, params.pore_volume);
  for (auto& k : perm) k = std::exp(params.perm_sigma * normal(rng));
  Vector xstar(static_cast<std::size_t>(n) * kBlock);
  for (auto& v : xstar) v = uniform(rng);

  auto factor = [&] { return std::max(0.5, 1.0 + params.drift * normal(rng)); };

  ProblemSequence seq;
  seq.provenance.params = params;
  for (int step = 0; step < params.nsteps; ++step) {
    if (step > 0 && params.drift > 0.0) {
      for (auto& k : perm) k *= factor();
      for (auto& v : pv) v *= factor();
    }
    LinearSystem sys{assemble(g, params, perm, pv), {}};
    sys.b = spmv(sys.a, xstar);
    seq.systems.push_back(std::move(sys));
  }
  return seq;
}

void save_sequence(ProblemSequence const& seq, std::filesystem::path const& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = "ascpr-sequence";
  manifest["version"] = 1;
  manifest["block_size"] = seq.block_size();
  manifest["variable_dimensions"] = seq.provenance.variable_dimensions;
  if (seq.provenance.kind == "synthetic") {
    auto const& p = seq.provenance.params;
    manifest["generator"] = {{"nx", p.nx},
                             {"ny", p.ny},
                             {"nz", p.nz},
                             {"nsteps", p.nsteps},
                             {"drift", p.drift},
                             {"seed", p.seed},
                             {"perm_sigma", p.perm_sigma},
                             {"vertical_ratio", p.vertical_ratio},
                             {"compressibility", p.compressibility},
                             {"pore_volume", p.pore_volume},
                             {"coupling", p.coupling}};
  }
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t k = 0; k < seq.systems.size(); ++k) {
    std::string const a = fmt::format("A_{:03}.mtx", k + 1);
    std::string const b = fmt::format("b_{:03}.mtx", k + 1);
    write_matrix_market(dir / a, seq.systems[k].a);
    write_vector(dir / b, seq.systems[k].b);
    list.push_back({{"matrix", a}, {"rhs", b}});
  }
  manifest["systems"] = std::move(list);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw InputError(fmt::format("cannot write {}", (dir / "manifest.json").string()));
  out << manifest.dump(2) << '\n';
}

ProblemSequence load_sequence(std::filesystem::path const& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw InputError(fmt::format("cannot open manifest {}", manifest_path.string()));
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (nlohmann::json::exception const& e) {
    throw InputError(fmt::format("{}: {}", manifest_path.string(), e.what()));
  }
  if (!m.contains("systems") || !m["systems"].is_array() || m["systems"].empty())
    throw InputError(fmt::format("{}: no systems listed", manifest_path.string()));

  ProblemSequence seq;
  seq.provenance.kind = "manifest";
  seq.provenance.manifest = manifest_path;
  seq.provenance.variable_dimensions = m.value("variable_dimensions", false);
  int const declared = m.value("block_size", 0);
  auto const base = manifest_path.parent_path();
  for (auto const& entry : m["systems"]) {
    if (!entry.contains("matrix") || !entry.contains("rhs"))
      throw InputError(fmt::format("{}: each system needs \"matrix\" and \"rhs\"",
                                   manifest_path.string()));
    auto const apath = base / entry["matrix"].get<std::string>();
    auto content = read_matrix_market(apath);
    int const b = declared > 0 ? declared : content.block_size;
    LinearSystem sys{BlockCsrMatrix::from_scalar(content.matrix, b),
                     read_vector(base / entry["rhs"].get<std::string>())};
    if (sys.b.size() != static_cast<std::size_t>(sys.a.rows()))
      throw InputError(fmt::format("{}: right-hand side has length {}, matrix has {} rows",
                                   apath.string(), sys.b.size(), sys.a.rows()));
    if (!seq.systems.empty()) {
      auto const& first = seq.systems.front().a;
      if (first.block_size() != sys.a.block_size())
        throw InputError("all systems in a sequence must share the block size");
      if (first.rows() != sys.a.rows() && !seq.provenance.variable_dimensions)
        throw InputError(fmt::format(
            "{}: dimension {} differs from {} and the manifest does not allow variable dimensions",
            apath.string(), sys.a.rows(), first.rows()));
    }
    seq.systems.push_back(std::move(sys));
  }
  return seq;
}

}  // namespace ascpr::harness
