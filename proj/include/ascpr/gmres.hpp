#pragma once

/// @file gmres.hpp
/// @brief Right-preconditioned restarted GMRES(m).

#include <functional>
#include <span>

#include "ascpr/sparse.hpp"

namespace ascpr {

struct GmresParams {
  int restart = 28;        ///< m, Krylov dimension per cycle
  int max_restarts = 100;  ///< MaxIt
  double tol = 1e-5;       ///< on ||r|| / ||r0||
};

struct GmresResult {
  int restarts = 0;          ///< outer cycles run
  int inner_iterations = 0;  ///< Arnoldi steps over all cycles
  bool converged = false;
  bool happy_breakdown = false;
  double relative_residual = 0.0;  ///< true ||b - A x|| / ||b - A x0||
};

/// z = B r. Must act as a fixed linear map for the duration of one solve.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<double const> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<double const> r, std::span<double> z) const override;
};

/// y = A x
using LinearOperator = std::function<void(std::span<double const>, std::span<double>)>;

/// Solves A x = b starting from the x passed in, which receives the result.
/// Each cycle stops early once the least-squares residual estimate drops
/// below tol; convergence is then confirmed on the true residual.
/// Throws DivergenceError on a non-finite residual.
GmresResult gmres_solve(LinearOperator const& a, std::span<double const> b, std::span<double> x,
                        Preconditioner const& pre, GmresParams const& params, int workers = 1);
GmresResult gmres_solve(CsrMatrix const& a, std::span<double const> b, std::span<double> x,
                        Preconditioner const& pre, GmresParams const& params, int workers = 1);
GmresResult gmres_solve(BlockCsrMatrix const& a, std::span<double const> b, std::span<double> x,
                        Preconditioner const& pre, GmresParams const& params, int workers = 1);

}  // namespace ascpr
