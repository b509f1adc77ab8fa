// SPDX-License-Identifier: Apache-2.0
#include "romdiff/online.hpp"

#include <Eigen/LU>
#include <chrono>
#include <cmath>

namespace romdiff {

ReducedOperators assemble_reduced(const ReducedBasis& basis, const OperatorPair& ops,
                                  const std::vector<double>& mu, int n) {
  if (ops.groups != basis.groups || ops.cells != basis.cells)
    throw DimensionError("assemble_reduced: basis and operators disagree on (G, N_R)");
  if (n < 1 || n > basis.rank())
    throw DimensionError("assemble_reduced: rank " + std::to_string(n) +
                         " outside 1.." + std::to_string(basis.rank()));

  const auto t0 = std::chrono::steady_clock::now();
  ReducedOperators red;
  red.mu = mu;
  red.a = DenseMatrix::Zero(n, n);
  red.b = DenseMatrix::Zero(n, n);

  const index_t cells = ops.cells;
  const Eigen::Index stride = basis.v.rows();
  DenseMatrix w(cells, n);
  // group component xi_j^g is rows [g*cells, (g+1)*cells) of column j, which
  // is contiguous in the column-major layout
  auto accumulate = [&](const SparseMatrix& blk, index_t g, index_t gp, DenseMatrix& target) {
    if (blk.empty()) return;
    for (int j = 0; j < n; ++j) {
      w.col(j).setZero();
      blk.apply_add(basis.v.data() + j * stride + gp * cells, w.col(j).data());
    }
    target.noalias() += basis.v.block(g * cells, 0, cells, n).transpose() * w;
  };
  for (index_t g = 0; g < ops.groups; ++g)
    for (index_t gp = 0; gp < ops.groups; ++gp) {
      accumulate(ops.a(g, gp), g, gp, red.a);
      accumulate(ops.b(g, gp), g, gp, red.b);
    }
  red.t_assemble_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return red;
}

namespace {

struct LiftedPair {
  Vector c;
  Vector u;
};

/// Scales c so the lifted vector has unit norm, then sign-fixes the lifted
/// vector (and c with it) so eigenvector errors are phase-unambiguous.
LiftedPair lift_normalized(const Eigen::Ref<const DenseMatrix>& v, const Vector& c_raw) {
  LiftedPair out;
  out.u = v * c_raw;
  const double norm = out.u.norm();
  if (norm < 1e-300) throw BreakdownError("solve_reduced: lifted vector vanished");
  out.u /= norm;
  out.c = c_raw / norm;
  Eigen::Index imax = 0;
  out.u.cwiseAbs().maxCoeff(&imax);
  if (out.u[imax] < 0.0) {
    out.u = -out.u;
    out.c = -out.c;
  }
  return out;
}

}  // namespace

ReducedSolution solve_reduced(const ReducedOperators& reduced,
                              const Eigen::Ref<const DenseMatrix>& v,
                              const EigSolveSettings& settings) {
  const int n = static_cast<int>(reduced.a.rows());
  if (v.cols() != n) throw DimensionError("solve_reduced: basis column count mismatch");

  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::PartialPivLU<DenseMatrix> lu(reduced.a);
  if (!(lu.rcond() > 1e-300))
    throw SingularMatrixError("solve_reduced: reduced operator is singular", -1);
  const Eigen::PartialPivLU<DenseMatrix> lu_t(reduced.a.transpose());

  const EigSolution direct = power_iteration(
      [&](const Vector& x) { return Vector(reduced.b * x); },
      [&](const Vector& x) { return Vector(lu.solve(x)); }, n, settings);
  const EigSolution adjoint = power_iteration(
      [&](const Vector& x) { return Vector(reduced.b.transpose() * x); },
      [&](const Vector& x) { return Vector(lu_t.solve(x)); }, n, settings);
  const auto t1 = std::chrono::steady_clock::now();

  ReducedSolution sol;
  sol.k = direct.k;
  sol.k_adjoint = adjoint.k;
  sol.converged = direct.converged && adjoint.converged;
  sol.iterations_direct = direct.iterations;
  sol.iterations_adjoint = adjoint.iterations;
  sol.t_solve_s = std::chrono::duration<double>(t1 - t0).count();

  LiftedPair d = lift_normalized(v, direct.u);
  LiftedPair a = lift_normalized(v, adjoint.u);
  sol.c = std::move(d.c);
  sol.u = std::move(d.u);
  sol.c_star = std::move(a.c);
  sol.u_star = std::move(a.u);
  return sol;
}

std::pair<double, double> residual_norms(const OperatorPair& ops, const ReducedSolution& sol) {
  const Vector r = ops.apply_b(sol.u) - sol.k * ops.apply_a(sol.u);
  const Vector r_star = ops.apply_b_transpose(sol.u_star) - sol.k * ops.apply_a_transpose(sol.u_star);
  return {r.norm(), r_star.norm()};
}

double eta_k(const ReducedOperators& reduced, const ReducedSolution& sol, double norm_r,
             double norm_rstar) {
  const double denom = sol.c_star.dot(reduced.a * sol.c);
  const double scale = reduced.a.cwiseAbs().maxCoeff();
  if (std::abs(denom) < 1e-14 * scale)
    throw DegenerateDenominatorError("eta_k: |<c*, A_n c>| below threshold");
  return norm_r * norm_rstar / std::abs(denom);
}

ErrorReport compare_to_hf(const EigSolution& hf_direct, const EigSolution& hf_adjoint,
                          const ReducedSolution& sol) {
  ErrorReport report;
  report.e_u = (hf_direct.u - sol.u).norm();
  report.e_ustar = (hf_adjoint.u - sol.u_star).norm();
  report.e_k = std::abs(hf_direct.k - sol.k);
  return report;
}

ErrorReport build_error_report(const OperatorPair& ops, const ReducedOperators& reduced,
                               const ReducedSolution& sol, const EigSolution& hf_direct,
                               const EigSolution& hf_adjoint) {
  ErrorReport report = compare_to_hf(hf_direct, hf_adjoint, sol);
  const auto [norm_r, norm_rstar] = residual_norms(ops, sol);
  report.norm_r = norm_r;
  report.norm_rstar = norm_rstar;
  try {
    report.eta_k = eta_k(reduced, sol, norm_r, norm_rstar);
  } catch (const DegenerateDenominatorError&) {
    report.eta_k.reset();
  }
  return report;
}

Prefactors prefactors_from_reports(const std::vector<ErrorReport>& reports, int n,
                                   const std::string& label, const WarnFn& warn) {
  if (reports.empty()) throw EmptySetError("prefactors: empty prefactor set");
  constexpr double kDenomFloor = 1e-14;
  Prefactors pf;
  pf.n = n;
  pf.label = label;
  pf.sample_count = static_cast<int>(reports.size());
  int valid_u = 0, valid_ustar = 0, valid_k = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const ErrorReport& r = reports[i];
    if (r.norm_r > kDenomFloor) {
      pf.c_u = std::max(pf.c_u, r.e_u / r.norm_r);
      ++valid_u;
    } else if (warn) {
      warn("prefactors: point " + std::to_string(i) + " skipped for C_u (||R|| degenerate)");
    }
    if (r.norm_rstar > kDenomFloor) {
      pf.c_ustar = std::max(pf.c_ustar, r.e_ustar / r.norm_rstar);
      ++valid_ustar;
    } else if (warn) {
      warn("prefactors: point " + std::to_string(i) + " skipped for C_u* (||R*|| degenerate)");
    }
    if (r.eta_k && *r.eta_k > kDenomFloor) {
      pf.c_k = std::max(pf.c_k, r.e_k / *r.eta_k);
      ++valid_k;
    } else if (warn) {
      warn("prefactors: point " + std::to_string(i) + " skipped for C_k (eta degenerate)");
    }
  }
  if (valid_u == 0 || valid_ustar == 0 || valid_k == 0)
    throw EmptySetError("prefactors: all denominators degenerate");
  return pf;
}

Prefactors calibrate_prefactors(const ReducedBasis& basis, const Model& model,
                                const SampleSet& pref_set, const EigSolveSettings& hf_settings,
                                const EigSolveSettings& reduced_settings, int n, int workers,
                                const WarnFn& warn) {
  if (pref_set.points.empty()) throw EmptySetError("calibrate_prefactors: empty prefactor set");
  const std::vector<Snapshot> hf = generate_snapshots(model, pref_set, hf_settings, workers, warn);

  std::vector<ErrorReport> reports;
  for (const Snapshot& snap : hf) {
    if (!snap.usable()) {
      if (warn) warn("calibrate_prefactors: skipping failed pref point");
      continue;
    }
    const OperatorPair ops = assemble_at(model, snap.mu);
    const ReducedOperators red = assemble_reduced(basis, ops, snap.mu, n);
    const ReducedSolution sol = solve_reduced(red, basis.v.leftCols(n), reduced_settings);
    EigSolution hf_direct;
    hf_direct.u = snap.u;
    hf_direct.k = snap.k;
    EigSolution hf_adjoint;
    hf_adjoint.u = snap.u_star;
    hf_adjoint.k = snap.k;
    reports.push_back(build_error_report(ops, red, sol, hf_direct, hf_adjoint));
  }
  return prefactors_from_reports(reports, n, pref_set.label, warn);
}

std::tuple<double, double, double> certified_estimates(const Prefactors& prefactors, int n,
                                                       double norm_r, double norm_rstar,
                                                       double eta) {
  if (prefactors.n != n)
    throw DimensionError("certified_estimates: prefactors were calibrated for rank " +
                         std::to_string(prefactors.n) + ", query uses rank " + std::to_string(n));
  return {prefactors.c_u * norm_r, prefactors.c_ustar * norm_rstar, prefactors.c_k * eta};
}

}  // namespace romdiff
