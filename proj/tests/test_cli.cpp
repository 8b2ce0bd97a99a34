#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ascpr/harness/cli.hpp"
#include "ascpr/matrix_market.hpp"
#include "test_support.hpp"

namespace ascpr::harness {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ascpr");
  std::vector<char const*> argv;
  for (auto const& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int const code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(std::string const& name) {
  auto const dir = fs::temp_directory_path() / ("ascpr_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run({}).code, kExitBadInput);
  EXPECT_EQ(run({"frobnicate"}).code, kExitBadInput);
  auto const r = run({"bench", "--no-such-flag"});
  EXPECT_EQ(r.code, kExitBadInput);
  EXPECT_NE(r.err.find("no-such-flag"), std::string::npos);
  EXPECT_EQ(run({"bench", "--theta", "1.5"}).code, kExitBadInput);
  EXPECT_EQ(run({"solve", "--matrix", "/nonexistent.mtx"}).code, kExitBadInput);
  EXPECT_EQ(run({"verify"}).code, kExitBadInput);
}

TEST(Cli, HelpExitsWithZero) {
  auto const r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("generate"), std::string::npos);
}

TEST(Cli, MalformedMatrixReportsLine) {
  auto const dir = scratch("malformed");
  {
    std::ofstream f(dir / "bad.mtx");
    f << "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 x 1\n";
  }
  auto const r = run({"verify", "--matrix", (dir / "bad.mtx").string()});
  EXPECT_EQ(r.code, kExitBadInput);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, VerifyPoisson) {
  auto const dir = scratch("verify");
  write_matrix_market(dir / "p.mtx", test::poisson2d(10, 10));
  auto const r = run({"verify", "--matrix", (dir / "p.mtx").string()});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("[PASS]"), std::string::npos);
  EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, GenerateThenSolveFromManifest) {
  auto const dir = scratch("generate");
  {
    std::ofstream f(dir / "gen.toml");
    f << "[problem]\nnx = 6\nny = 6\nnz = 2\nnsteps = 2\n";
  }
  auto const g = run({"generate", "--config", (dir / "gen.toml").string(), "--out",
                      (dir / "seq").string()});
  ASSERT_EQ(g.code, kExitOk) << g.err;
  ASSERT_TRUE(fs::exists(dir / "seq" / "manifest.json"));
  {
    std::ofstream f(dir / "solve.toml");
    f << "coarsest_size = 10\n[problem]\nmanifest = \"seq/manifest.json\"\n";
  }
  auto const s = run({"solve", "--config", (dir / "solve.toml").string(), "--mu", "100",
                      "--out", (dir / "x").string()});
  EXPECT_EQ(s.code, kExitOk) << s.err;
  EXPECT_NE(s.out.find("SetupCalls 1"), std::string::npos) << s.out;
  EXPECT_TRUE(fs::exists(dir / "x" / "x_002.mtx"));
  fs::remove_all(dir);
}

TEST(Cli, SolveSingleMatrix) {
  auto const dir = scratch("solve");
  write_matrix_market(dir / "p.mtx", test::poisson2d(15, 15));
  auto const r = run({"solve", "--matrix", (dir / "p.mtx").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  write_vector(dir / "b.mtx", Vector(5, 1.0));
  EXPECT_EQ(run({"solve", "--matrix", (dir / "p.mtx").string(), "--rhs",
                 (dir / "b.mtx").string()})
                .code,
            kExitBadInput);
  fs::remove_all(dir);
}

TEST(Cli, BenchWritesReports) {
  auto const dir = scratch("bench");
  {
    std::ofstream f(dir / "bench.toml");
    f << "theta = 0.0\nmu = [0, 5]\ncoarsest_size = 20\n"
         "[problem]\nnx = 6\nny = 6\nnz = 2\nnsteps = 3\n";
  }
  auto const r = run({"bench", "--config", (dir / "bench.toml").string(), "--workers", "1,2",
                      "--out", (dir / "runs").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  for (auto const* f : {"report.csv", "report.json", "hierarchy.json"})
    EXPECT_TRUE(fs::exists(dir / "runs" / f)) << f;
  std::ifstream j(dir / "runs" / "report.json");
  auto const report = nlohmann::json::parse(j);
  EXPECT_EQ(report["rows"].size(), 4u);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ascpr::harness
