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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "bottomk/hash.hpp"

namespace bottomk {

// Adaptive attack on a cardinality estimator over the ground set
// U = {0, ..., universe-1}. Each round partitions U into random halves and
// queries both; every member of a half is scored by the half's relative
// overshoot (estimate - size) / size. Halves that overshoot tend to contain
// the globally lowest-priority keys, since extra low priorities shrink the
// kth order statistic and inflate (k-1)/tau. After all rounds the top-scored
// ceil(removal_fraction * |U|) keys are removed and U minus the removals is
// queried once; a strongly negative relative error on that query is the
// attack succeeding.
//
// rounds and removal_fraction are calibration constants; they come from an
// empirical calibration run, not from any guarantee.
struct AttackConfig {
  std::uint64_t universe = 0;  // |U|
  std::uint32_t k = 0;         // sketch size under attack
  std::uint32_t rounds = 0;
  double removal_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (k == 0) throw std::invalid_argument("sketch size must be positive");
    if (universe < 4ull * k)
      throw std::invalid_argument("ground set must hold at least 4k keys");
    if (!(removal_fraction >= 0 && removal_fraction < 1))
      throw std::invalid_argument("removal fraction must be in [0,1)");
  }
};

struct AttackReport {
  std::uint64_t queries_used = 0;
  std::vector<Key> removed_keys;  // sorted by key id
  std::uint64_t final_true_cardinality = 0;
  double final_estimate = 0.0;
  double relative_error = 0.0;  // signed, (estimate - truth) / truth
};

struct TranscriptEntry {
  std::uint64_t qid = 0;
  std::uint64_t size = 0;
  double estimate = 0.0;
};

using CardinalityOracle = std::function<double(std::span<const Key>)>;

namespace detail {

// Deterministic Fisher-Yates permutation of [0, universe) for one round.
inline std::vector<Key> attack_permutation(const AttackConfig& cfg,
                                           std::uint32_t round) {
  std::vector<Key> perm(cfg.universe);
  std::iota(perm.begin(), perm.end(), Key{0});
  CounterRng rng(derive_seed(cfg.seed, SeedDomain::kAttackPartition, round));
  for (std::uint64_t i = cfg.universe - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.next_below(i + 1)]);
  return perm;
}

// Top-scored keys, ties broken by key id; sorted by key id on return.
inline std::vector<Key> removal_from_scores(const AttackConfig& cfg,
                                            const std::vector<double>& scores) {
  if (cfg.rounds == 0) return {};
  const auto count = static_cast<std::uint64_t>(
      std::ceil(cfg.removal_fraction * static_cast<double>(cfg.universe)));
  if (count == 0) return {};
  std::vector<Key> keys(cfg.universe);
  std::iota(keys.begin(), keys.end(), Key{0});
  auto worse = [&scores](Key a, Key b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::nth_element(keys.begin(), keys.begin() + count, keys.end(), worse);
  keys.resize(count);
  std::sort(keys.begin(), keys.end());
  return keys;
}

inline std::vector<Key> survivors_of(const AttackConfig& cfg,
                                     const std::vector<Key>& removed) {
  std::vector<bool> gone(cfg.universe, false);
  for (Key key : removed) gone[key] = true;
  std::vector<Key> out;
  out.reserve(cfg.universe - removed.size());
  for (Key key = 0; key < cfg.universe; ++key)
    if (!gone[key]) out.push_back(key);
  return out;
}

}  // namespace detail

// Runs the attack against `oracle`, which answers cardinality estimates for
// arbitrary subsets of U. Appends one transcript entry per query when a
// transcript sink is given. Queries to a stateful oracle are serialized.
inline AttackReport attack_standard_estimator(
    const AttackConfig& cfg, const CardinalityOracle& oracle,
    std::vector<TranscriptEntry>* transcript = nullptr) {
  cfg.validate();

  std::vector<double> scores(cfg.universe, 0.0);
  std::uint64_t qid = 0;
  const std::uint64_t half = cfg.universe / 2;
  for (std::uint32_t round = 0; round < cfg.rounds; ++round) {
    const std::vector<Key> perm = detail::attack_permutation(cfg, round);
    const std::span<const Key> halves[2] = {
        std::span<const Key>(perm).subspan(0, half),
        std::span<const Key>(perm).subspan(half)};
    for (const auto& q : halves) {
      const double est = oracle(q);
      if (transcript) transcript->push_back({qid, q.size(), est});
      ++qid;
      const double delta =
          (est - static_cast<double>(q.size())) / static_cast<double>(q.size());
      for (Key key : q) scores[key] += delta;
    }
  }

  AttackReport report;
  report.removed_keys = detail::removal_from_scores(cfg, scores);
  const std::vector<Key> final_query =
      detail::survivors_of(cfg, report.removed_keys);
  report.final_estimate = oracle(final_query);
  if (transcript)
    transcript->push_back({qid, final_query.size(), report.final_estimate});
  report.queries_used = qid + 1;
  report.final_true_cardinality = final_query.size();
  report.relative_error =
      (report.final_estimate - static_cast<double>(final_query.size())) /
      static_cast<double>(final_query.size());
  return report;
}

// Replays the exact query sequence of a logged attack run against a different
// estimator: the round partitions are reproduced from the config seed and the
// removed set is recomputed from the *logged* estimates, so the replayed
// sequence is identical to what the logged run issued. Returns one entry per
// query with the new estimator's answer; entry.size is the true cardinality.
inline std::vector<TranscriptEntry> replay_attack(
    const AttackConfig& cfg, const std::vector<TranscriptEntry>& logged,
    const CardinalityOracle& oracle) {
  cfg.validate();
  if (logged.size() != 2ull * cfg.rounds + 1)
    throw std::invalid_argument("transcript length does not match config");

  std::vector<double> scores(cfg.universe, 0.0);
  std::vector<TranscriptEntry> replayed;
  replayed.reserve(logged.size());
  std::uint64_t qid = 0;
  const std::uint64_t half = cfg.universe / 2;
  for (std::uint32_t round = 0; round < cfg.rounds; ++round) {
    const std::vector<Key> perm = detail::attack_permutation(cfg, round);
    const std::span<const Key> halves[2] = {
        std::span<const Key>(perm).subspan(0, half),
        std::span<const Key>(perm).subspan(half)};
    for (const auto& q : halves) {
      if (logged[qid].size != q.size())
        throw std::invalid_argument("transcript does not match partitions");
      replayed.push_back({qid, q.size(), oracle(q)});
      const double delta = (logged[qid].estimate - static_cast<double>(q.size())) /
                           static_cast<double>(q.size());
      for (Key key : q) scores[key] += delta;
      ++qid;
    }
  }
  const std::vector<Key> final_query =
      detail::survivors_of(cfg, detail::removal_from_scores(cfg, scores));
  replayed.push_back({qid, final_query.size(), oracle(final_query)});
  return replayed;
}

}  // namespace bottomk
