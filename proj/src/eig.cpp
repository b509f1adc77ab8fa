// SPDX-License-Identifier: Apache-2.0
#include "romdiff/eig.hpp"

#include <cmath>
#include <limits>

namespace romdiff {

void sign_fix(Vector& u) {
  Eigen::Index imax = 0;
  double vmax = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a > vmax) {
      vmax = a;
      imax = i;
    }
  }
  if (u.size() > 0 && u[imax] < 0.0) u = -u;
}

EigSolution power_iteration(const LinearOp& apply_b, const LinearOp& solve_a, index_t size,
                            const EigSolveSettings& settings, const Vector* start) {
  settings.validate();
  if (size < 1) throw DimensionError("power_iteration: size must be >= 1");

  Vector u;
  if (start != nullptr) {
    if (start->size() != size) throw DimensionError("power_iteration: bad start vector size");
    u = *start;
    const double n0 = u.norm();
    if (n0 < 1e-300) throw BreakdownError("power_iteration: zero start vector");
    u /= n0;
  } else {
    u = Vector::Constant(size, 1.0 / std::sqrt(static_cast<double>(size)));
  }
  sign_fix(u);

  EigSolution sol;
  double k_prev = std::numeric_limits<double>::quiet_NaN();
  for (int m = 1; m <= settings.max_outer; ++m) {
    Vector y = solve_a(apply_b(u));
    const double norm_y = y.norm();
    if (norm_y < 1e-300)
      throw BreakdownError("power_iteration: iterate vanished (no fission source)");
    const double k = norm_y;  // valid with unit-norm u and a Perron-positive pair
    y /= norm_y;
    sign_fix(y);

    sol.residual_u = (y - u).norm();
    sol.residual_k = std::isnan(k_prev) ? std::numeric_limits<double>::infinity()
                                        : std::abs(k - k_prev) / std::abs(k);
    u = y;
    k_prev = k;
    sol.iterations = m;
    if (sol.residual_u <= settings.tol_u && sol.residual_k <= settings.tol_k) {
      sol.converged = true;
      break;
    }
  }
  sol.u = std::move(u);
  sol.k = k_prev;
  return sol;
}

EigSolution solve_direct(const OperatorPair& ops, const EigSolveSettings& settings) {
  const LuFactors lu = lu_factorize(ops.assemble_full_a());
  return power_iteration([&ops](const Vector& x) { return ops.apply_b(x); },
                         [&lu](const Vector& x) { return lu.solve(x); }, ops.size(), settings);
}

EigSolution solve_adjoint(const OperatorPair& ops, const EigSolveSettings& settings) {
  const LuFactors lu = lu_factorize(ops.assemble_full_a().transposed());
  return power_iteration([&ops](const Vector& x) { return ops.apply_b_transpose(x); },
                         [&lu](const Vector& x) { return lu.solve(x); }, ops.size(), settings);
}

}  // namespace romdiff
