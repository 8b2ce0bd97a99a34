#include "ascpr/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include <fmt/format.h>

#include "ascpr/amg.hpp"
#include "ascpr/coloring.hpp"
#include "ascpr/cpr.hpp"
#include "ascpr/ilu.hpp"
#include "ascpr/smoothers.hpp"

namespace ascpr::harness {

namespace {

constexpr int kWorkerCounts[] = {1, 2, 8};

double max_abs(std::span<double const> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Sparse product through an ordered map per row; slow but transparent.
CsrMatrix multiply(CsrMatrix const& a, CsrMatrix const& b) {
  std::vector<Triplet> t;
  for (Index i = 0; i < a.rows(); ++i) {
    std::map<Index, double> row;
    auto const ac = a.row_cols(i);
    auto const av = a.row_values(i);
    for (std::size_t k = 0; k < ac.size(); ++k) {
      auto const bc = b.row_cols(ac[k]);
      auto const bv = b.row_values(ac[k]);
      for (std::size_t q = 0; q < bc.size(); ++q) row[bc[q]] += av[k] * bv[q];
    }
    for (auto const& [j, v] : row) t.push_back({i, j, v});
  }
  return CsrMatrix::from_triplets(a.rows(), b.cols(), std::move(t));
}

VerifyCheck pattern_reconstruction(BlockCsrMatrix const& a, BiluFactors const& f) {
  VerifyCheck c{"ILU pattern reconstruction <= 1e-12", true, {}};
  CsrMatrix const lu = multiply(f.lower().to_scalar(), f.upper().to_scalar());
  CsrMatrix const as = a.to_scalar();
  double worst = 0.0;
  for (Index i = 0; i < as.rows(); ++i) {
    auto const cols = as.row_cols(i);
    auto const vals = as.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      worst = std::max(worst, std::abs(lu.at(i, cols[k]) - vals[k]));
  }
  double const scale = std::max(max_abs(as.values()), 1e-300);
  double const rel = worst / scale;
  c.passed = rel <= 1e-12;
  c.detail = fmt::format("max relative deviation {:.3e}", rel);
  return c;
}

}  // namespace

std::vector<VerifyCheck> verify_matrix(CsrMatrix const& a, int block_size, double theta) {
  if (!a.square()) throw DimensionError("verify needs a square matrix");
  std::vector<VerifyCheck> out;
  auto guarded = [&](std::string const& name, auto&& fn) {
    try {
      fn();
    } catch (std::exception const& e) {
      out.push_back({name, false, e.what()});
    }
  };

  BlockCsrMatrix const ab = BlockCsrMatrix::from_scalar(a, block_size);
  CsrMatrix const ap = block_size == 1 ? a : pressure_matrix(ab);

  guarded("coloring", [&] {
    ColorPartition const p = color_matrix(ap, theta);
    PartitionReport const r = verify_partition(ap, theta, p);
    for (auto const& chk : r.checks)
      out.push_back({"coloring " + chk.name, chk.passed,
                     chk.detail.empty() ? fmt::format("{} colors", r.colors) : chk.detail});

    Vector b(ap.rows());
    for (Index i = 0; i < ap.rows(); ++i) b[i] = 1.0 + std::sin(0.37 * i);
    Vector ref(ap.rows(), 0.0);
    pgs_scm_sweep(ap, b, ref, p, 1);
    bool same = true;
    for (int w : kWorkerCounts) {
      Vector x(ap.rows(), 0.0);
      pgs_scm_sweep(ap, b, x, p, w);
      same = same && x == ref;
    }
    out.push_back({"PGS-SCM sweep identical for workers 1, 2, 8", same, {}});
  });

  guarded("ILU", [&] {
    BiluFactors const f = bilu0_factorize(ab, {.perturb_singular_pivots = false});
    out.push_back(pattern_reconstruction(ab, f));
    Vector r(ab.rows());
    for (Index i = 0; i < ab.rows(); ++i) r[i] = std::cos(0.11 * i);
    Vector seq(ab.rows());
    f.apply_sequential(r, seq);
    bool same = true;
    for (int w : kWorkerCounts) {
      Vector z(ab.rows());
      f.apply(r, z, w);
      same = same && z == seq;
    }
    out.push_back({"level-scheduled solve identical to sequential", same,
                   fmt::format("{} lower / {} upper levels", f.lower_schedule().levels(),
                               f.upper_schedule().levels())});
  });

  guarded("AMG", [&] {
    AmgParams params;
    params.smoother_theta = theta;
    params.coarsest_size = std::min<Index>(params.coarsest_size, std::max<Index>(ap.rows() / 8, 2));
    AmgHierarchy const h = AmgHierarchy::build(ap, params);
    double worst = 0.0;
    for (std::size_t l = 0; l + 1 < h.levels().size(); ++l) {
      auto const& lev = h.levels()[l];
      CsrMatrix const rap = multiply(transpose(lev.p), multiply(lev.a, lev.p));
      CsrMatrix const& next = h.levels()[l + 1].a;
      double const scale = std::max(max_abs(rap.values()), 1e-300);
      for (Index i = 0; i < rap.rows(); ++i) {
        auto const cols = rap.row_cols(i);
        auto const vals = rap.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
          worst = std::max(worst, std::abs(next.at(i, cols[k]) - vals[k]) / scale);
      }
      for (Index i = 0; i < next.rows(); ++i) {
        auto const cols = next.row_cols(i);
        auto const vals = next.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
          worst = std::max(worst, std::abs(rap.at(i, cols[k]) - vals[k]) / scale);
      }
    }
    out.push_back({"AMG Galerkin identity <= 1e-13", worst <= 1e-13,
                   fmt::format("{} levels, max relative deviation {:.3e}", h.levels().size(),
                               worst)});
  });
  return out;
}

}  // namespace ascpr::harness
