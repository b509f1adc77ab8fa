// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "romdiff/model.hpp"

namespace romdiff {

struct EigSolveSettings {
  double tol_u = 1e-7;   // relative l2 tolerance on successive flux iterates
  double tol_k = 1e-8;   // relative tolerance on the eigenvalue
  int max_outer = 500;

  void validate() const {
    if (!(tol_u > 0.0) || !(tol_k > 0.0))
      throw ConfigError("solver settings: tolerances must be > 0");
    if (max_outer < 1) throw ConfigError("solver settings: max_outer must be >= 1");
  }
};

struct EigSolution {
  Vector u;              // unit l2 norm, sign-fixed
  double k = 0.0;        // dominant eigenvalue (k_eff)
  int iterations = 0;
  bool converged = false;
  double residual_u = 0.0;  // last ||u_{m+1} - u_m||_2
  double residual_k = 0.0;  // last |k_{m+1} - k_m| / |k_{m+1}|
};

/// Sign convention: the entry of largest magnitude is made positive
/// (ties break to the lowest index). Idempotent.
void sign_fix(Vector& u);

using LinearOp = std::function<Vector(const Vector&)>;

/// Power iteration on A^{-1} B. With unit-norm iterates the eigenvalue
/// update is k = ||A^{-1} B u||_2. Convergence requires both the flux and
/// eigenvalue criteria on successive iterates. Non-convergence after
/// max_outer is reported through the flag, not an exception.
EigSolution power_iteration(const LinearOp& apply_b, const LinearOp& solve_a, index_t size,
                            const EigSolveSettings& settings, const Vector* start = nullptr);

/// Sparse-LU-backed solve of A u = (1/k) B u for the dominant pair.
EigSolution solve_direct(const OperatorPair& ops, const EigSolveSettings& settings);

/// Same for the adjoint pair A^T u* = (1/k) B^T u*.
EigSolution solve_adjoint(const OperatorPair& ops, const EigSolveSettings& settings);

}  // namespace romdiff
