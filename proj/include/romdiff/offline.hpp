// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "romdiff/eig.hpp"
#include "romdiff/param_map.hpp"
#include "romdiff/sampling.hpp"

namespace romdiff {

/// One converged high-fidelity direct + adjoint solve at a parameter point.
struct Snapshot {
  std::vector<double> mu;
  double k = 0.0;
  Vector u;       // unit norm, sign-fixed
  Vector u_star;  // unit norm, sign-fixed
  bool converged = false;
  int iterations_direct = 0;
  int iterations_adjoint = 0;
  double t_direct_s = 0.0;   // wall time, never persisted
  double t_adjoint_s = 0.0;
  std::string error;         // non-empty when the solve failed outright

  bool usable() const { return error.empty() && converged; }
};

/// Either an exact rank or a relative singular-value tolerance with an
/// optional hard cap: modes with sigma_i >= epsilon * sigma_1 are retained.
struct TruncationCriterion {
  std::optional<int> rank;
  double epsilon = 1e-6;
  std::optional<int> max_rank;

  std::string describe() const;
};

struct PodResult {
  DenseMatrix modes;               // leading left singular vectors
  std::vector<double> sigma;       // all singular values, non-increasing
  int retained = 0;                // number of columns kept

  std::vector<double> sigma_retained() const {
    return {sigma.begin(), sigma.begin() + retained};
  }
};

/// Rank-truncated SVD of the snapshot matrix. The retained modes minimize
/// the total squared projection error over all subspaces of that rank.
PodResult pod_truncate(const DenseMatrix& snapshots, const TruncationCriterion& criterion);

struct ReducedBasis {
  DenseMatrix v;    // N x n, orthonormal columns; direct modes first
  index_t groups = 0;
  index_t cells = 0;
  int n_direct = 0;   // retained direct POD rank (n_1)
  int n_adjoint = 0;  // retained adjoint POD rank (n_2)
  std::vector<double> sigma_direct;
  std::vector<double> sigma_adjoint;
  // provenance
  std::string training_label;
  std::uint64_t training_seed = 0;
  std::string criterion;

  int rank() const { return static_cast<int>(v.cols()); }
};

/// POD on the direct and adjoint snapshot matrices, then the orthonormalized
/// union [direct modes | adjoint modes]. Non-converged snapshots are skipped.
ReducedBasis build_reduced_basis(const std::vector<Snapshot>& snapshots,
                                 const TruncationCriterion& criterion, index_t groups,
                                 index_t cells, double drop_tol = 1e-10);

using WarnFn = std::function<void(const std::string&)>;

/// High-fidelity direct + adjoint solves over a sample set, in sample order.
/// Per-point failures are recorded in the snapshot's error field; the batch
/// throws only if every point fails.
std::vector<Snapshot> generate_snapshots(const Model& model, const SampleSet& samples,
                                         const EigSolveSettings& settings, int workers = 1,
                                         const WarnFn& warn = {});

/// Runs fn(i) for i in [0, count) on `workers` threads. Exceptions are
/// rethrown on the calling thread after join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace romdiff
