// SPDX-License-Identifier: Apache-2.0
#include "romdiff/offline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace romdiff {

std::string TruncationCriterion::describe() const {
  std::ostringstream out;
  if (rank) {
    out << "rank=" << *rank;
  } else {
    out << "epsilon=" << epsilon;
    if (max_rank) out << ",max_rank=" << *max_rank;
  }
  return out.str();
}

PodResult pod_truncate(const DenseMatrix& snapshots, const TruncationCriterion& criterion) {
  if (snapshots.cols() < 1) throw EmptySetError("pod_truncate: no snapshots");
  const SvdResult dec = svd(snapshots);

  PodResult out;
  out.sigma = dec.singular_values;
  const int available = static_cast<int>(out.sigma.size());

  if (criterion.rank) {
    if (*criterion.rank < 1) throw RankError("pod_truncate: rank must be >= 1");
    if (*criterion.rank > static_cast<int>(snapshots.cols()))
      throw RankError("pod_truncate: rank " + std::to_string(*criterion.rank) +
                      " exceeds snapshot count " + std::to_string(snapshots.cols()));
    out.retained = std::min(*criterion.rank, available);
  } else {
    if (!(criterion.epsilon > 0.0))
      throw InvalidBoundsError("pod_truncate: epsilon must be > 0");
    const double sigma1 = out.sigma.front();
    if (!(sigma1 > 0.0)) throw EmptySetError("pod_truncate: snapshot matrix is zero");
    int n = 0;
    while (n < available && out.sigma[n] >= criterion.epsilon * sigma1) ++n;
    out.retained = std::max(n, 1);
    if (criterion.max_rank) out.retained = std::min(out.retained, *criterion.max_rank);
  }
  out.modes = dec.left.leftCols(out.retained);
  return out;
}

ReducedBasis build_reduced_basis(const std::vector<Snapshot>& snapshots,
                                 const TruncationCriterion& criterion, index_t groups,
                                 index_t cells, double drop_tol) {
  std::vector<const Snapshot*> usable;
  for (const Snapshot& s : snapshots)
    if (s.usable()) usable.push_back(&s);
  if (usable.empty()) throw EmptySetError("build_reduced_basis: no converged snapshots");

  const index_t n = groups * cells;
  DenseMatrix s_direct(n, static_cast<Eigen::Index>(usable.size()));
  DenseMatrix s_adjoint(n, static_cast<Eigen::Index>(usable.size()));
  for (std::size_t j = 0; j < usable.size(); ++j) {
    if (usable[j]->u.size() != n || usable[j]->u_star.size() != n)
      throw DimensionError("build_reduced_basis: snapshot size mismatch");
    s_direct.col(static_cast<Eigen::Index>(j)) = usable[j]->u;
    s_adjoint.col(static_cast<Eigen::Index>(j)) = usable[j]->u_star;
  }

  const PodResult pod_direct = pod_truncate(s_direct, criterion);
  const PodResult pod_adjoint = pod_truncate(s_adjoint, criterion);

  DenseMatrix stacked(n, pod_direct.retained + pod_adjoint.retained);
  stacked.leftCols(pod_direct.retained) = pod_direct.modes;
  stacked.rightCols(pod_adjoint.retained) = pod_adjoint.modes;

  ReducedBasis basis;
  basis.v = orthonormalize(stacked, drop_tol);
  basis.groups = groups;
  basis.cells = cells;
  basis.n_direct = pod_direct.retained;
  basis.n_adjoint = pod_adjoint.retained;
  basis.sigma_direct = pod_direct.sigma;
  basis.sigma_adjoint = pod_adjoint.sigma;
  basis.criterion = criterion.describe();
  return basis;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<Snapshot> generate_snapshots(const Model& model, const SampleSet& samples,
                                         const EigSolveSettings& settings, int workers,
                                         const WarnFn& warn) {
  if (samples.points.empty()) throw EmptySetError("generate_snapshots: sample set is empty");

  std::vector<Snapshot> snapshots(samples.size());
  parallel_for(samples.size(), workers, [&](std::size_t i) {
    Snapshot& snap = snapshots[i];
    snap.mu = samples.points[i];
    try {
      const OperatorPair ops = assemble_at(model, snap.mu);
      const auto t0 = std::chrono::steady_clock::now();
      const EigSolution direct = solve_direct(ops, settings);
      const auto t1 = std::chrono::steady_clock::now();
      const EigSolution adjoint = solve_adjoint(ops, settings);
      const auto t2 = std::chrono::steady_clock::now();
      snap.k = direct.k;
      snap.u = direct.u;
      snap.u_star = adjoint.u;
      snap.converged = direct.converged && adjoint.converged;
      snap.iterations_direct = direct.iterations;
      snap.iterations_adjoint = adjoint.iterations;
      snap.t_direct_s = std::chrono::duration<double>(t1 - t0).count();
      snap.t_adjoint_s = std::chrono::duration<double>(t2 - t1).count();
    } catch (const std::exception& e) {
      snap.error = e.what();
    }
  });

  std::size_t failed = 0;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const Snapshot& snap = snapshots[i];
    if (!snap.error.empty()) {
      ++failed;
      if (warn) warn("point " + std::to_string(i) + " failed: " + snap.error);
    } else if (!snap.converged && warn) {
      warn("point " + std::to_string(i) + " did not converge within " +
           std::to_string(settings.max_outer) + " outer iterations");
    }
  }
  if (failed == snapshots.size())
    throw ConvergenceError("generate_snapshots: every sample point failed");
  return snapshots;
}

}  // namespace romdiff
