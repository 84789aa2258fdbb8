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

#include "bottomk/workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace bottomk {
namespace {

TEST(WorkloadSpec, Validation) {
  WorkloadSpec spec;
  spec.support = 10;
  spec.query_size = 20;
  EXPECT_THROW(spec.validate(), std::invalid_argument);

  spec.query_size = 5;
  spec.distribution = Distribution::kPareto;
  spec.shape = 1.0;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.shape = 1.5;
  EXPECT_NO_THROW(spec.validate());
}

TEST(WorkloadStream, UniformQueriesHaveExactSizeAndDistinctKeys) {
  WorkloadSpec spec;
  spec.support = 100'000;
  spec.query_size = 5'000;
  spec.seed = 3;
  WorkloadStream stream(spec);
  for (std::uint64_t qid = 0; qid < 5; ++qid) {
    const std::vector<Key> q = stream.query(qid);
    EXPECT_EQ(q.size(), 5'000u);
    std::set<Key> distinct(q.begin(), q.end());
    EXPECT_EQ(distinct.size(), q.size());
    for (Key key : q) EXPECT_LT(key, spec.support);
  }
}

TEST(WorkloadStream, DeterministicUnderSeed) {
  WorkloadSpec spec;
  spec.distribution = Distribution::kPareto;
  spec.shape = 2.0;
  spec.support = 10'000;
  spec.query_size = 500;
  spec.seed = 11;
  WorkloadStream a(spec), b(spec);
  for (std::uint64_t qid = 0; qid < 10; ++qid)
    EXPECT_EQ(a.query(qid), b.query(qid));

  spec.seed = 12;
  WorkloadStream c(spec);
  bool any_differ = false;
  for (std::uint64_t qid = 0; qid < 10; ++qid)
    any_differ |= a.query(qid) != c.query(qid);
  EXPECT_TRUE(any_differ);
}

TEST(WorkloadStream, QueriesArePureInQid) {
  WorkloadSpec spec;
  spec.support = 1'000;
  spec.query_size = 50;
  spec.seed = 5;
  WorkloadStream stream(spec);
  const std::vector<Key> q7 = stream.query(7);
  stream.query(3);
  stream.query(9);
  EXPECT_EQ(stream.query(7), q7);
}

// Inclusion frequencies against a direct simulation of the exponential-rank
// draw: rank each key by E_i / w_i with independent exponentials and keep the
// query_size earliest. The alias-with-rejection sampler must reproduce the
// same inclusion probabilities.
TEST(WorkloadStream, ParetoInclusionMatchesExponentialRankOracle) {
  WorkloadSpec spec;
  spec.distribution = Distribution::kPareto;
  spec.shape = 1.5;
  spec.support = 10'000;
  spec.query_size = 500;
  spec.seed = 21;
  WorkloadStream stream(spec);

  Key heaviest = 0;
  for (Key key = 1; key < spec.support; ++key)
    if (stream.weight(key) > stream.weight(heaviest)) heaviest = key;
  // A mid-weight key keeps the check away from the saturated p ~ 1 regime.
  Key mid = 0;
  double best_gap = 1e300;
  for (Key key = 0; key < spec.support; ++key) {
    const double gap = std::abs(stream.weight(key) - 8.0);
    if (gap < best_gap) {
      best_gap = gap;
      mid = key;
    }
  }

  const int workload_queries = 1'000;
  int hits_heavy = 0, hits_mid = 0;
  for (int qid = 0; qid < workload_queries; ++qid) {
    const std::vector<Key> q = stream.query(static_cast<std::uint64_t>(qid));
    hits_heavy += std::count(q.begin(), q.end(), heaviest);
    hits_mid += std::count(q.begin(), q.end(), mid);
  }

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unit(1e-12, 1.0);
  const int oracle_trials = 2'000;
  int oracle_heavy = 0, oracle_mid = 0;
  std::vector<double> rank(spec.support);
  std::vector<std::uint32_t> order(spec.support);
  for (int t = 0; t < oracle_trials; ++t) {
    for (Key key = 0; key < spec.support; ++key)
      rank[key] = -std::log(unit(gen)) / stream.weight(key);
    const double cut = [&] {
      std::vector<double> tmp = rank;
      std::nth_element(tmp.begin(), tmp.begin() + spec.query_size - 1, tmp.end());
      return tmp[spec.query_size - 1];
    }();
    oracle_heavy += rank[heaviest] <= cut;
    oracle_mid += rank[mid] <= cut;
  }

  auto band = [&](int hits, int oracle_hits) {
    const double p1 = static_cast<double>(hits) / workload_queries;
    const double p2 = static_cast<double>(oracle_hits) / oracle_trials;
    const double pool = (hits + oracle_hits) /
                        static_cast<double>(workload_queries + oracle_trials);
    const double sigma = std::sqrt(pool * (1 - pool) *
                                   (1.0 / workload_queries + 1.0 / oracle_trials));
    EXPECT_LE(std::abs(p1 - p2), std::max(3 * sigma, 1e-9))
        << "p1=" << p1 << " p2=" << p2;
  };
  band(hits_heavy, oracle_heavy);
  band(hits_mid, oracle_mid);
}

TEST(ParticipationTracker, SingleQueryCountsOnce) {
  SketchRandomness rand(4, 100);
  const std::vector<Key> q{1, 2, 3};
  ParticipationTracker tracker;
  tracker.record(q, sketch_set(rand, q, 8));
  for (Key key : q) {
    EXPECT_EQ(tracker.set_count(key), 1u);
    EXPECT_EQ(tracker.sketch_count(key), 1u);
  }
  EXPECT_EQ(tracker.set_count(4), 0u);
}

TEST(ParticipationTracker, TruncatedSketchCountsFewerKeys) {
  SketchRandomness rand(4, 100);
  const std::vector<Key> q{1, 2, 3};
  ParticipationTracker tracker;
  tracker.record(q, sketch_set(rand, q, 2));
  std::uint64_t sketch_total = 0, set_total = 0;
  for (Key key : q) {
    set_total += tracker.set_count(key);
    sketch_total += tracker.sketch_count(key);
  }
  EXPECT_EQ(set_total, 3u);
  EXPECT_EQ(sketch_total, 2u);
}

TEST(ParticipationTracker, MatchesBruteForceRecount) {
  WorkloadSpec spec;
  spec.support = 2'000;
  spec.query_size = 100;
  spec.seed = 8;
  WorkloadStream stream(spec);
  SketchRandomness rand(8, spec.support);

  ParticipationTracker tracker;
  std::vector<std::uint64_t> set_recount(spec.support, 0);
  std::vector<std::uint64_t> sketch_recount(spec.support, 0);
  for (std::uint64_t qid = 0; qid < 100; ++qid) {
    const std::vector<Key> q = stream.query(qid);
    const BottomKSketch s = sketch_set(rand, q, 16);
    tracker.record(q, s);
    for (Key key : q) ++set_recount[key];
    for (const auto& e : s.entries()) ++sketch_recount[e.key];
  }

  std::uint64_t max_set = 0, max_sketch = 0;
  for (Key key = 0; key < spec.support; ++key) {
    max_set = std::max(max_set, set_recount[key]);
    max_sketch = std::max(max_sketch, sketch_recount[key]);
    EXPECT_EQ(tracker.set_count(key), set_recount[key]);
    EXPECT_EQ(tracker.sketch_count(key), sketch_recount[key]);
    EXPECT_LE(tracker.sketch_count(key), tracker.set_count(key));
  }
  EXPECT_EQ(tracker.max_set_count(), max_set);
  EXPECT_EQ(tracker.max_sketch_count(), max_sketch);
  EXPECT_LE(tracker.max_sketch_count(), tracker.max_set_count());
}

}  // namespace
}  // namespace bottomk
