#include "ascpr/harness/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace ascpr::harness {

namespace {

template <class T>
std::vector<T> with(std::vector<T> v, T required) {
  if (std::find(v.begin(), v.end(), required) == v.end()) v.push_back(required);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

nlohmann::json provenance_json(Provenance const& p) {
  if (p.kind == "manifest") return {{"kind", "manifest"}, {"manifest", p.manifest.string()}};
  auto const& g = p.params;
  return {{"kind", "synthetic"}, {"nx", g.nx},     {"ny", g.ny},         {"nz", g.nz},
          {"nsteps", g.nsteps},  {"drift", g.drift}, {"seed", g.seed}};
}

double ratio(double num, double den) {
  if (!std::isfinite(num) || !std::isfinite(den)) return std::numeric_limits<double>::quiet_NaN();
  if (num == den) return 1.0;
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

RunReport run_benchmark(RunConfig const& config, ProblemSequence const& seq) {
  if (seq.systems.empty()) throw InputError("benchmark needs at least one system");
  auto const thetas = with(config.theta, config.theta.front());
  auto const mus = with(config.mu, 0);
  auto const workers = with(config.workers, 1);

  RunReport report;
  report.problem = provenance_json(seq.provenance);
  report.problem["systems"] = seq.systems.size();
  report.problem["rows"] = seq.systems.front().a.rows();
  report.problem["block_size"] = seq.block_size();

  std::map<std::tuple<double, int, int>, std::size_t> index;
  for (double theta : thetas)
    for (int mu : mus)
      for (int w : workers) {
        BenchRow row;
        row.theta = theta;
        row.mu = mu;
        row.workers = w;
        row.systems = static_cast<int>(seq.systems.size());
        try {
          SequenceResult const r =
              ascpr_gmres_sequence(seq.systems, sequence_params(config, theta, mu, w));
          row.setup_calls = r.setup_calls;
          row.iter = r.total_iterations;
          row.inner = r.total_inner;
          row.restarts = r.total_restarts;
          row.time = r.total_seconds;
          row.setup_time = r.setup_seconds;
          row.solve_time = r.solve_seconds;
          row.overhead_time = std::max(0.0, r.total_seconds - r.setup_seconds - r.solve_seconds);
          row.setup_ratio = row.time > 0.0 ? std::clamp(row.setup_time / row.time, 0.0, 1.0) : 0.0;
          row.converged = r.all_converged;
        } catch (std::exception const& e) {
          row.error = e.what();
          row.time = std::numeric_limits<double>::quiet_NaN();
        }
        index[{theta, mu, w}] = report.rows.size();
        report.rows.push_back(std::move(row));
      }

  for (auto& row : report.rows) {
    double const t1 = report.rows[index.at({row.theta, row.mu, 1})].time;
    double const t10 = report.rows[index.at({row.theta, 0, 1})].time;
    row.speedup = ratio(t1, row.time);
    row.speedup_star = ratio(t10, row.time);
  }
  return report;
}

nlohmann::json hierarchy_summary(AmgHierarchy const& h) {
  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t l = 0; l < h.levels().size(); ++l) {
    auto const& lev = h.levels()[l];
    nlohmann::json j = {{"level", l}, {"rows", lev.a.rows()}, {"nnz", lev.a.nnz()}};
    if (lev.partition) j["colors"] = lev.partition->colors();
    levels.push_back(std::move(j));
  }
  return {{"levels", std::move(levels)},
          {"operator_complexity", h.operator_complexity()},
          {"grid_complexity", h.grid_complexity()}};
}

nlohmann::json hierarchy_summary(RunConfig const& config, ProblemSequence const& seq) {
  nlohmann::json out = nlohmann::json::array();
  if (seq.systems.empty()) return out;
  for (double theta : config.theta) {
    SequenceParams const p = sequence_params(config, theta, 0, 1);
    AmgHierarchy const h = AmgHierarchy::build(pressure_matrix(seq.systems.front().a), p.cpr.amg);
    nlohmann::json j = hierarchy_summary(h);
    j["theta"] = theta;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace ascpr::harness
