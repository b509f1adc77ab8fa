// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "romdiff/errors.hpp"

namespace romdiff {

/// Axis-aligned box in R^d.
struct Box {
  std::vector<std::pair<double, double>> ranges;  // (lo, hi) per coordinate

  std::size_t dim() const { return ranges.size(); }
  void validate() const;
  bool contains(const std::vector<double>& point, double tol = 0.0) const;
};

struct SampleSet {
  std::string label;  // train | test | pref
  std::uint64_t seed = 0;
  Box bounds;
  std::vector<std::vector<double>> points;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return bounds.dim(); }
};

/// Latin Hypercube Sampling: per coordinate, exactly one point in each of the
/// count equal-width strata, with independently permuted stratum assignments.
/// Deterministic for fixed (bounds, count, seed).
SampleSet lhs_sample(const Box& bounds, std::size_t count, std::uint64_t seed,
                     std::string label = {});

/// LHS over all coordinates except pinned_index, which is held constant at
/// pinned_value (the value may sit outside the box).
SampleSet fixed_coordinate_sample(const Box& bounds, std::size_t count, std::uint64_t seed,
                                  std::size_t pinned_index, double pinned_value,
                                  std::string label = {});

/// True when any point of a equals a point of b exactly.
bool intersects(const SampleSet& a, const SampleSet& b);

/// Regenerates the set with incremented seeds until it shares no exact point
/// with any of the given sets. The pinned coordinate, when present, is
/// exempt from the comparison-triggered reseed only in the sense that it is
/// regenerated identically.
SampleSet make_disjoint(SampleSet set, const std::vector<const SampleSet*>& others,
                        std::optional<std::pair<std::size_t, double>> pinned = std::nullopt);

}  // namespace romdiff
