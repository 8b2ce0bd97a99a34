#include "ascpr/harness/cli.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ascpr/harness/benchmark.hpp"
#include "ascpr/harness/config.hpp"
#include "ascpr/harness/generator.hpp"
#include "ascpr/harness/report.hpp"
#include "ascpr/harness/verify.hpp"
#include "ascpr/matrix_market.hpp"

namespace ascpr::harness {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string matrix;
  std::string rhs;
  std::optional<std::uint64_t> seed;
  std::optional<int> block_size;
  std::vector<int> workers;
  std::vector<double> theta;
  std::vector<int> mu;
};

RunConfig effective_config(Options const& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) c.problem.seed = *o.seed;
  if (!o.workers.empty()) c.workers = o.workers;
  if (!o.theta.empty()) c.theta = o.theta;
  if (!o.mu.empty()) c.mu = o.mu;
  for (double t : c.theta)
    if (!(t >= 0.0 && t <= 1.0)) throw InputError(fmt::format("--theta {} outside [0, 1]", t));
  for (int m : c.mu)
    if (m < 0) throw InputError(fmt::format("--mu {} is negative", m));
  for (int w : c.workers)
    if (w < 1) throw InputError(fmt::format("--workers {} is below 1", w));
  return c;
}

ProblemSequence problem_for(RunConfig const& c) {
  return c.manifest ? load_sequence(*c.manifest) : generate_blackoil_like_sequence(c.problem);
}

int run_generate(Options const& o, std::ostream& out) {
  RunConfig const c = effective_config(o);
  if (c.manifest) throw InputError("generate needs synthetic problem parameters, not a manifest");
  std::string const dir = o.out.empty() ? "sequence" : o.out;
  ProblemSequence const seq = generate_blackoil_like_sequence(c.problem);
  save_sequence(seq, dir);
  fmt::print(out, "wrote {} systems of size {} to {}\n", seq.systems.size(),
             seq.systems.front().a.rows(), dir);
  return kExitOk;
}

int run_solve(Options const& o, std::ostream& out) {
  RunConfig const c = effective_config(o);
  ProblemSequence seq;
  if (!o.matrix.empty()) {
    MatrixMarketContent const m = read_matrix_market(std::filesystem::path(o.matrix));
    int const b = o.block_size.value_or(m.block_size);
    LinearSystem sys{BlockCsrMatrix::from_scalar(m.matrix, b), {}};
    if (!o.rhs.empty()) {
      sys.b = read_vector(std::filesystem::path(o.rhs));
      if (sys.b.size() != static_cast<std::size_t>(sys.a.rows()))
        throw InputError(fmt::format("{}: length {} does not match {} matrix rows", o.rhs,
                                     sys.b.size(), sys.a.rows()));
    } else {
      sys.b = spmv(sys.a, Vector(sys.a.rows(), 1.0));
    }
    seq.systems.push_back(std::move(sys));
  } else {
    seq = problem_for(c);
  }

  SequenceResult const r = ascpr_gmres_sequence(
      seq.systems, sequence_params(c, c.theta.front(), c.mu.front(), c.workers.front()));
  fmt::print(out, "{:>6} {:>8} {:>6} {:>9} {:>12}\n", "system", "rebuilt", "inner", "restarts",
             "rel.resid");
  for (std::size_t k = 0; k < r.systems.size(); ++k) {
    auto const& s = r.systems[k];
    fmt::print(out, "{:>6} {:>8} {:>6} {:>9} {:>12.3e}\n", k + 1, s.rebuilt ? "yes" : "no",
               s.gmres.inner_iterations, s.gmres.restarts, s.gmres.relative_residual);
  }
  fmt::print(out, "SetupCalls {}  Iter {}  setup {:.3f}s  solve {:.3f}s\n", r.setup_calls,
             r.total_iterations, r.setup_seconds, r.solve_seconds);
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    for (std::size_t k = 0; k < r.systems.size(); ++k)
      write_vector(std::filesystem::path(o.out) / fmt::format("x_{:03}.mtx", k + 1),
                   r.systems[k].x);
  }
  return r.all_converged ? kExitOk : kExitSolverFailure;
}

int run_bench(Options const& o, std::ostream& out) {
  RunConfig const c = effective_config(o);
  ProblemSequence const seq = problem_for(c);
  RunReport const report = run_benchmark(c, seq);
  std::string const dir = o.out.empty() ? "runs" : o.out;
  write_report_files(dir, report, hierarchy_summary(c, seq));
  bool ok = true;
  for (auto const& row : report.rows) {
    fmt::print(out, "theta={} mu={} workers={}: SetupCalls={} Iter={} Time={:.3f}s {}\n",
               row.theta, row.mu, row.workers, row.setup_calls, row.iter, row.time,
               row.error.empty() ? (row.converged ? "ok" : "NOT CONVERGED") : row.error);
    ok = ok && row.error.empty() && row.converged;
  }
  fmt::print(out, "reports written to {}\n", dir);
  return ok ? kExitOk : kExitSolverFailure;
}

int run_verify(Options const& o, std::ostream& out) {
  if (o.matrix.empty()) throw InputError("verify needs --matrix");
  MatrixMarketContent const m = read_matrix_market(std::filesystem::path(o.matrix));
  double const theta = o.theta.empty() ? 0.0 : o.theta.front();
  if (!(theta >= 0.0 && theta <= 1.0)) throw InputError("--theta outside [0, 1]");
  auto const checks = verify_matrix(m.matrix, o.block_size.value_or(m.block_size), theta);
  bool ok = true;
  for (auto const& c : checks) {
    fmt::print(out, "[{}] {}{}\n", c.passed ? "PASS" : "FAIL", c.name,
               c.detail.empty() ? "" : "  (" + c.detail + ")");
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitSolverFailure;
}

}  // namespace

int cli_main(int argc, char const* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive-setup CPR preconditioned GMRES with multi-color Gauss-Seidel smoothing",
               "ascpr"};
  app.require_subcommand(1, 1);
  Options o;

  auto* gen = app.add_subcommand("generate", "write a synthetic system sequence");
  auto* solve = app.add_subcommand("solve", "solve a matrix or a configured sequence");
  auto* bench = app.add_subcommand("bench", "run the (theta, mu, workers) benchmark grid");
  auto* verify = app.add_subcommand("verify", "run the property checks on a matrix");

  for (auto* sub : {gen, solve, bench}) sub->add_option("--config", o.config, "TOML or JSON config");
  for (auto* sub : {gen, solve, bench}) sub->add_option("--out", o.out, "output directory");
  for (auto* sub : {gen, solve, bench}) sub->add_option("--seed", o.seed, "generator seed");
  for (auto* sub : {solve, verify}) {
    sub->add_option("--matrix", o.matrix, "MatrixMarket file")->check(CLI::ExistingFile);
    sub->add_option("--block-size", o.block_size, "cell block size")->check(CLI::PositiveNumber);
  }
  solve->add_option("--rhs", o.rhs, "right-hand side (MatrixMarket array)")
      ->check(CLI::ExistingFile);
  for (auto* sub : {solve, bench}) {
    sub->add_option("--workers", o.workers, "worker count(s)")->delimiter(',');
    sub->add_option("--mu", o.mu, "reuse threshold(s)")->delimiter(',');
  }
  for (auto* sub : {solve, bench, verify})
    sub->add_option("--theta", o.theta, "strong-connection threshold(s)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e, out, err);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e, out, err);
  } catch (CLI::ParseError const& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitBadInput;
  }

  try {
    if (gen->parsed()) return run_generate(o, out);
    if (solve->parsed()) return run_solve(o, out);
    if (bench->parsed()) return run_bench(o, out);
    return run_verify(o, out);
  } catch (InputError const& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (DimensionError const& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (Error const& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (std::filesystem::filesystem_error const& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}

int cli_main(int argc, char const* const* argv) {
  return cli_main(argc, argv, std::cout, std::cerr);
}

}  // namespace ascpr::harness
