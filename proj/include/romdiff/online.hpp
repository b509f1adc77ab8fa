// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <tuple>

#include "romdiff/offline.hpp"

namespace romdiff {

struct ReducedOperators {
  DenseMatrix a;  // n x n
  DenseMatrix b;  // n x n
  std::vector<double> mu;
  double t_assemble_s = 0.0;
};

struct ReducedSolution {
  Vector c;        // reduced coordinates, scaled so the lifted vector is unit norm
  Vector c_star;
  double k = 0.0;  // reduced eigenvalue from the direct problem
  double k_adjoint = 0.0;
  Vector u;        // lifted, unit norm, sign-fixed
  Vector u_star;
  bool converged = false;
  int iterations_direct = 0;
  int iterations_adjoint = 0;
  double t_solve_s = 0.0;
};

/// Errors and estimators for one (mu, n) query. Estimator fields are absent
/// when they could not be evaluated (degenerate eta denominator, missing
/// prefactors).
struct ErrorReport {
  double e_u = 0.0;
  double e_ustar = 0.0;
  double e_k = 0.0;
  double norm_r = 0.0;
  double norm_rstar = 0.0;
  std::optional<double> eta_k;
  std::optional<double> delta_u;
  std::optional<double> delta_ustar;
  std::optional<double> delta_k;
};

/// Empirical max error/estimator ratios over a prefactor set.
struct Prefactors {
  double c_u = 0.0;
  double c_ustar = 0.0;
  double c_k = 0.0;
  int n = 0;            // basis rank the constants belong to
  std::string label;
  int sample_count = 0;
};

/// Galerkin projection assembled blockwise from the group components of the
/// leading n basis columns: no full A or B matrix is formed.
ReducedOperators assemble_reduced(const ReducedBasis& basis, const OperatorPair& ops,
                                  const std::vector<double>& mu, int n);

/// Dense power iteration on the reduced pair (and its transpose), then lift,
/// normalize and sign-fix. v must hold the same n leading basis columns the
/// operators were assembled with.
ReducedSolution solve_reduced(const ReducedOperators& reduced,
                              const Eigen::Ref<const DenseMatrix>& v,
                              const EigSolveSettings& settings);

/// l2 norms of R = (B - k_n A) u_n and R* = (B^T - k_n A^T) u*_n.
std::pair<double, double> residual_norms(const OperatorPair& ops, const ReducedSolution& sol);

/// ||R|| ||R*|| / |<c*, A_n c>|. Throws DegenerateDenominatorError when the
/// denominator collapses.
double eta_k(const ReducedOperators& reduced, const ReducedSolution& sol, double norm_r,
             double norm_rstar);

/// l2 errors against the high-fidelity pair (all vectors unit, sign-fixed).
ErrorReport compare_to_hf(const EigSolution& hf_direct, const EigSolution& hf_adjoint,
                          const ReducedSolution& sol);

/// compare_to_hf plus residual norms and eta_k in one record.
ErrorReport build_error_report(const OperatorPair& ops, const ReducedOperators& reduced,
                               const ReducedSolution& sol, const EigSolution& hf_direct,
                               const EigSolution& hf_adjoint);

/// Max ratios over per-point reports; points with denominators below 1e-14
/// are skipped (warned). Throws EmptySetError when no point is usable.
Prefactors prefactors_from_reports(const std::vector<ErrorReport>& reports, int n,
                                   const std::string& label, const WarnFn& warn = {});

/// Spec-shaped convenience: high-fidelity solves at every pref point, reduced
/// queries at rank n, then the max ratios.
Prefactors calibrate_prefactors(const ReducedBasis& basis, const Model& model,
                                const SampleSet& pref_set, const EigSolveSettings& hf_settings,
                                const EigSolveSettings& reduced_settings, int n,
                                int workers = 1, const WarnFn& warn = {});

/// Delta^u = C^u ||R||, Delta^{u*} = C^{u*} ||R*||, Delta^k = C^k eta^k.
/// Throws DimensionError when the prefactor rank differs from n.
std::tuple<double, double, double> certified_estimates(const Prefactors& prefactors, int n,
                                                       double norm_r, double norm_rstar,
                                                       double eta);

}  // namespace romdiff
