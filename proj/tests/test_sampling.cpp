// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "romdiff/sampling.hpp"

using namespace romdiff;

namespace {

Box unit_box(std::size_t d) {
  Box box;
  for (std::size_t j = 0; j < d; ++j) box.ranges.emplace_back(0.0, 1.0);
  return box;
}

/// Each coordinate must hit each of the count strata exactly once.
bool lhs_property(const SampleSet& set) {
  const std::size_t count = set.size();
  for (std::size_t j = 0; j < set.dim(); ++j) {
    const auto [lo, hi] = set.bounds.ranges[j];
    std::vector<bool> hit(count, false);
    for (const auto& p : set.points) {
      const double t = (p[j] - lo) / (hi - lo);
      const auto stratum = static_cast<std::size_t>(t * static_cast<double>(count));
      if (stratum >= count || hit[stratum]) return false;
      hit[stratum] = true;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("lhs over [0.8,1.2]^5 with 100 points hits every stratum once") {
  Box box;
  for (int j = 0; j < 5; ++j) box.ranges.emplace_back(0.8, 1.2);
  const SampleSet set = lhs_sample(box, 100, 2024, "train");
  REQUIRE(set.size() == 100);
  for (const auto& p : set.points) CHECK(set.bounds.contains(p));
  CHECK(lhs_property(set));
}

TEST_CASE("single-point sample lies inside the box") {
  const SampleSet set = lhs_sample(unit_box(3), 1, 7);
  REQUIRE(set.size() == 1);
  CHECK(set.bounds.contains(set.points[0]));
}

TEST_CASE("1-d, four samples: one per quarter interval") {
  const SampleSet set = lhs_sample(unit_box(1), 4, 99);
  std::vector<double> xs;
  for (const auto& p : set.points) xs.push_back(p[0]);
  std::sort(xs.begin(), xs.end());
  for (int q = 0; q < 4; ++q) {
    CHECK(xs[q] >= 0.25 * q);
    CHECK(xs[q] < 0.25 * (q + 1));
  }
}

TEST_CASE("invalid bounds are rejected") {
  Box bad;
  bad.ranges.emplace_back(1.0, 1.0);
  CHECK_THROWS_AS(lhs_sample(bad, 3, 1), InvalidBoundsError);
  CHECK_THROWS_AS(lhs_sample(Box{}, 3, 1), InvalidBoundsError);
}

TEST_CASE("sampling is deterministic in (bounds, count, seed)") {
  const SampleSet a = lhs_sample(unit_box(4), 25, 123456789ULL);
  const SampleSet b = lhs_sample(unit_box(4), 25, 123456789ULL);
  CHECK(a.points == b.points);
  const SampleSet c = lhs_sample(unit_box(4), 25, 123456790ULL);
  CHECK(a.points != c.points);
}

TEST_CASE("pinned coordinate sample matches the paper-style test-set shape") {
  Box box;
  box.ranges.emplace_back(0.0, 72000.0);
  for (int j = 0; j < 8; ++j) box.ranges.emplace_back(0.0, 15000.0);
  const SampleSet set = fixed_coordinate_sample(box, 10, 5, 0, 30000.0, "test");
  REQUIRE(set.size() == 10);
  for (const auto& p : set.points) {
    CHECK(p[0] == 30000.0);
    for (int j = 1; j < 9; ++j) {
      CHECK(p[j] >= 0.0);
      CHECK(p[j] < 15000.0);
    }
  }
}

TEST_CASE("pinning index 0 of a 2-d box keeps points on a segment") {
  const SampleSet set = fixed_coordinate_sample(unit_box(2), 6, 11, 0, 0.0);
  for (const auto& p : set.points) CHECK(p[0] == 0.0);
}

TEST_CASE("pinned value outside the base box is honored") {
  const SampleSet set = fixed_coordinate_sample(unit_box(2), 4, 3, 0, 7.5);
  for (const auto& p : set.points) CHECK(p[0] == 7.5);
  CHECK_FALSE(set.bounds.contains(set.points[0]));
}

TEST_CASE("pinned index out of range is rejected") {
  CHECK_THROWS_AS(fixed_coordinate_sample(unit_box(2), 4, 3, 5, 0.5), InvalidBoundsError);
}

TEST_CASE("make_disjoint reseeds away from exact collisions") {
  const SampleSet train = lhs_sample(unit_box(2), 8, 42, "train");
  SampleSet clone = train;  // worst case: every point collides
  clone.label = "test";
  const SampleSet fixed = make_disjoint(clone, {&train});
  CHECK_FALSE(intersects(fixed, train));
  CHECK(fixed.seed != train.seed);
  CHECK(lhs_property(fixed));
}
