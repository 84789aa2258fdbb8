// Copyright 2026 The bottomk-robust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bottomk/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace bottomk {
namespace {

TEST(SketchRandomness, RejectsEmptyGroundSet) {
  EXPECT_THROW(SketchRandomness(42, 0), std::invalid_argument);
}

TEST(SketchRandomness, PriorityIsDeterministic) {
  SketchRandomness rand(42, 10);
  EXPECT_EQ(rand.priority(3), rand.priority(3));

  SketchRandomness same(42, 10);
  for (Key key = 0; key < 10; ++key)
    EXPECT_EQ(rand.priority(key), same.priority(key));
}

TEST(SketchRandomness, DistinctSeedsGiveDistinctPriorityVectors) {
  SketchRandomness a(42, 10), b(43, 10);
  bool any_differ = false;
  for (Key key = 0; key < 10; ++key)
    any_differ |= a.priority(key) != b.priority(key);
  EXPECT_TRUE(any_differ);
}

TEST(SketchRandomness, RejectsKeyOutsideGroundSet) {
  SketchRandomness rand(42, 10);
  EXPECT_THROW(rand.priority(10), std::invalid_argument);
  EXPECT_THROW(rand.priority(12345), std::invalid_argument);
}

TEST(SketchRandomness, PrioritiesAreInUnitInterval) {
  SketchRandomness rand(9, 1000);
  for (Key key = 0; key < 1000; ++key) {
    const double p = rand.priority(key);
    EXPECT_GE(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

// Monte-Carlo check over the full priority vector: the mean of n = 1e6
// Uniform(0,1) values lands within 3 sigma = 3 / sqrt(12 n) ~ 0.00087 of 1/2;
// the bound below is the looser 0.002 band.
TEST(SketchRandomness, EmpiricalMeanIsHalf) {
  const std::uint64_t n = 1'000'000;
  SketchRandomness rand(7, n);
  double sum = 0;
  for (Key key = 0; key < n; ++key) sum += rand.priority_unchecked(key);
  EXPECT_NEAR(sum / static_cast<double>(n), 0.5, 0.002);
}

// Kolmogorov-Smirnov distance to Uniform(0,1) over 1e5 keys.
TEST(SketchRandomness, KolmogorovSmirnovAgainstUniform) {
  const std::uint64_t n = 100'000;
  SketchRandomness rand(5, n);
  std::vector<double> values(n);
  for (Key key = 0; key < n; ++key) values[key] = rand.priority_unchecked(key);
  std::sort(values.begin(), values.end());
  double ks = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double ecdf_hi = static_cast<double>(i + 1) / n;
    const double ecdf_lo = static_cast<double>(i) / n;
    ks = std::max(ks, std::max(std::abs(ecdf_hi - values[i]),
                               std::abs(values[i] - ecdf_lo)));
  }
  EXPECT_LT(ks, 0.01);
}

TEST(SketchRandomness, PrioritiesPairwiseDistinct) {
  const std::uint64_t n = 10'000;
  SketchRandomness rand(1, n);
  std::set<double> seen;
  for (Key key = 0; key < n; ++key) seen.insert(rand.priority(key));
  EXPECT_EQ(seen.size(), n);
}

TEST(SketchRandomness, FingerprintBindsSeedAndGroundSet) {
  SketchRandomness a(42, 10), b(42, 10), c(43, 10), d(42, 11);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), c.fingerprint());
  EXPECT_NE(a.fingerprint(), d.fingerprint());
}

TEST(SeedDerivation, DomainsProduceIndependentSeeds) {
  const std::uint64_t master = 99;
  EXPECT_NE(derive_seed(master, SeedDomain::kSketchMap),
            derive_seed(master, SeedDomain::kNoise));
  EXPECT_NE(derive_seed(master, SeedDomain::kNoise, 0),
            derive_seed(master, SeedDomain::kNoise, 1));
}

}  // namespace
}  // namespace bottomk
