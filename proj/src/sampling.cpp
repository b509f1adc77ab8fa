// SPDX-License-Identifier: Apache-2.0
#include "romdiff/sampling.hpp"

#include <algorithm>
#include <numeric>

#include "romdiff/rng.hpp"

namespace romdiff {

void Box::validate() const {
  if (ranges.empty()) throw InvalidBoundsError("bounds: dimension must be >= 1");
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    if (!(ranges[j].first < ranges[j].second))
      throw InvalidBoundsError("bounds: lo >= hi in coordinate " + std::to_string(j));
  }
}

bool Box::contains(const std::vector<double>& point, double tol) const {
  if (point.size() != ranges.size()) return false;
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    const double span = ranges[j].second - ranges[j].first;
    if (point[j] < ranges[j].first - tol * span || point[j] > ranges[j].second + tol * span)
      return false;
  }
  return true;
}

namespace {

SampleSet lhs_impl(const Box& bounds, std::size_t count, std::uint64_t seed,
                   std::string label, std::optional<std::pair<std::size_t, double>> pinned) {
  bounds.validate();
  if (count < 1) throw InvalidBoundsError("lhs_sample: count must be >= 1");
  if (pinned && pinned->first >= bounds.dim())
    throw InvalidBoundsError("fixed_coordinate_sample: pinned index out of range");

  SampleSet set;
  set.label = std::move(label);
  set.seed = seed;
  set.bounds = bounds;
  set.points.assign(count, std::vector<double>(bounds.dim(), 0.0));

  Xoshiro256pp rng(seed);
  std::vector<std::size_t> strata(count);
  for (std::size_t j = 0; j < bounds.dim(); ++j) {
    if (pinned && pinned->first == j) {
      for (auto& p : set.points) p[j] = pinned->second;
      continue;
    }
    const double lo = bounds.ranges[j].first;
    const double width = (bounds.ranges[j].second - lo) / static_cast<double>(count);
    std::iota(strata.begin(), strata.end(), 0);
    for (std::size_t i = count - 1; i > 0; --i)
      std::swap(strata[i], strata[rng.next_below(i + 1)]);
    for (std::size_t i = 0; i < count; ++i)
      set.points[i][j] = lo + (static_cast<double>(strata[i]) + rng.next_double()) * width;
  }
  return set;
}

}  // namespace

SampleSet lhs_sample(const Box& bounds, std::size_t count, std::uint64_t seed,
                     std::string label) {
  return lhs_impl(bounds, count, seed, std::move(label), std::nullopt);
}

SampleSet fixed_coordinate_sample(const Box& bounds, std::size_t count, std::uint64_t seed,
                                  std::size_t pinned_index, double pinned_value,
                                  std::string label) {
  return lhs_impl(bounds, count, seed, std::move(label),
                  std::make_pair(pinned_index, pinned_value));
}

bool intersects(const SampleSet& a, const SampleSet& b) {
  for (const auto& p : a.points)
    for (const auto& q : b.points)
      if (p == q) return true;
  return false;
}

SampleSet make_disjoint(SampleSet set, const std::vector<const SampleSet*>& others,
                        std::optional<std::pair<std::size_t, double>> pinned) {
  // Exact-match collisions are essentially impossible for continuous LHS;
  // the reseed loop is a cheap guarantee.
  for (int attempt = 0; attempt < 64; ++attempt) {
    bool clash = false;
    for (const SampleSet* other : others)
      if (other && intersects(set, *other)) clash = true;
    if (!clash) return set;
    const std::uint64_t next_seed = set.seed + 1;
    set = pinned ? fixed_coordinate_sample(set.bounds, set.size(), next_seed, pinned->first,
                                           pinned->second, set.label)
                 : lhs_sample(set.bounds, set.size(), next_seed, set.label);
  }
  throw InvalidBoundsError("make_disjoint: could not separate sample sets");
}

}  // namespace romdiff
