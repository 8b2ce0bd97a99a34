#include "ascpr/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace ascpr {

void IdentityPreconditioner::apply(std::span<double const> r, std::span<double> z) const {
  std::copy(r.begin(), r.end(), z.begin());
}

namespace {

void check_finite(double v, int restart) {
  if (!std::isfinite(v))
    throw DivergenceError(fmt::format("GMRES residual became non-finite in cycle {}", restart));
}

}  // namespace

GmresResult gmres_solve(LinearOperator const& a, std::span<double const> b, std::span<double> x,
                        Preconditioner const& pre, GmresParams const& params, int workers) {
  if (params.restart < 1) throw InputError("GMRES restart length must be at least 1");
  if (!(params.tol > 0.0)) throw InputError("GMRES tolerance must be positive");
  if (params.max_restarts < 1) throw InputError("GMRES needs at least one cycle");
  if (x.size() != b.size()) throw DimensionError("GMRES: x and b differ in length");

  std::size_t const n = b.size();
  int const m = params.restart;
  GmresResult out;

  Vector r(n), w(n), z(n);
  a(x, w);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
  double const r0 = norm2(r, workers);
  check_finite(r0, 0);
  if (r0 == 0.0) {
    out.converged = true;
    return out;
  }

  std::vector<Vector> basis(static_cast<std::size_t>(m) + 1, Vector(n));
  std::vector<double> h(static_cast<std::size_t>(m + 1) * m);  // column-major, ld m+1
  std::vector<double> cs(m), sn(m), g(static_cast<std::size_t>(m) + 1), y(m);
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(j) * (m + 1) + i]; };

  double beta = r0;
  while (out.restarts < params.max_restarts) {
    ++out.restarts;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;

    int k = 0;
    for (int j = 0; j < m; ++j) {
      pre.apply(basis[j], z);
      a(z, w);
      double const wnorm = norm2(w, workers);
      check_finite(wnorm, out.restarts);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = dot(w, basis[i], workers);
        axpy(-H(i, j), basis[i], w, workers);
      }
      double const hnext = norm2(w, workers);
      H(j + 1, j) = hnext;
      ++out.inner_iterations;
      k = j + 1;

      for (int i = 0; i < j; ++i) {
        double const t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      double const d = std::hypot(H(j, j), H(j + 1, j));
      if (d == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = H(j, j) / d;
        sn[j] = H(j + 1, j) / d;
      }
      H(j, j) = d;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      if (hnext <= 1e-14 * wnorm) {
        out.happy_breakdown = true;
        break;
      }
      if (std::abs(g[j + 1]) < params.tol * r0) break;
      for (std::size_t i = 0; i < n; ++i) basis[j + 1][i] = w[i] / hnext;
    }

    // Back substitution on the k x k triangle.
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < k; ++l) s -= H(i, l) * y[l];
      y[i] = H(i, i) != 0.0 ? s / H(i, i) : 0.0;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < k; ++i) axpy(y[i], basis[i], w, workers);
    pre.apply(w, z);
    axpy(1.0, z, x, workers);

    a(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    beta = norm2(r, workers);
    check_finite(beta, out.restarts);
    out.relative_residual = beta / r0;
    if (out.relative_residual < params.tol) {
      out.converged = true;
      break;
    }
    if (beta == 0.0 || out.happy_breakdown) break;  // the Krylov space is exhausted
  }
  return out;
}

GmresResult gmres_solve(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
                        Preconditioner const& pre, GmresParams const& params, int workers) {
  if (!a.square() || static_cast<std::size_t>(a.rows()) != b.size())
    throw DimensionError(fmt::format("GMRES: {}x{} matrix with right-hand side of length {}",
                                     a.rows(), a.cols(), b.size()));
  return gmres_solve([&](std::span<double const> v, std::span<double> out) {
                       spmv(a, v, out, workers);
                     },
                     b, x, pre, params, workers);
}

GmresResult gmres_solve(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
                        Preconditioner const& pre, GmresParams const& params, int workers) {
  if (a.rows() != a.cols() || static_cast<std::size_t>(a.rows()) != b.size())
    throw DimensionError(fmt::format("GMRES: {}x{} matrix with right-hand side of length {}",
                                     a.rows(), a.cols(), b.size()));
  return gmres_solve([&](std::span<double const> v, std::span<double> out) {
                       spmv(a, v, out, workers);
                     },
                     b, x, pre, params, workers);
}

}  // namespace ascpr
