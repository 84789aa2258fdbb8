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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bottomk/hash.hpp"
#include "bottomk/sketch.hpp"

namespace bottomk {

enum class Distribution { kUniform, kPareto };

struct WorkloadSpec {
  Distribution distribution = Distribution::kUniform;
  double shape = 2.0;  // Pareto tail index; scale x_m is fixed at 1
  std::uint64_t support = 1'000'000;
  std::uint32_t query_size = 5'000;
  std::uint64_t num_queries = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (support == 0) throw std::invalid_argument("support must be positive");
    if (query_size == 0) throw std::invalid_argument("query size must be positive");
    if (query_size > support)
      throw std::invalid_argument("query size exceeds support");
    if (distribution == Distribution::kPareto && !(shape > 1))
      throw std::invalid_argument("pareto shape must exceed 1");
  }
};

// Deterministic stream of query sets. query(qid) is a pure function of
// (spec.seed, qid); distinct streams may run concurrently but one stream
// object keeps a scratch workspace and is single-writer.
//
// Uniform queries are simple random samples without replacement. Pareto
// queries fix a popularity weight per key once per workload (drawn from
// Pareto(shape, 1) under the workload seed) and sample without replacement
// with probability proportional to weight, via an alias table with
// duplicate rejection: successively picking a fresh key proportional to its
// weight, which realizes the same draw as ranking keys by independent
// exponential arrival times E_i / w_i and keeping the query_size earliest.
class WorkloadStream {
 public:
  explicit WorkloadStream(const WorkloadSpec& spec) : spec_(spec) {
    spec.validate();
    stamp_.assign(spec_.support, 0);
    if (spec_.distribution == Distribution::kPareto) {
      build_weights();
      build_alias();
    }
  }

  const WorkloadSpec& spec() const noexcept { return spec_; }

  double weight(Key key) const {
    if (key >= spec_.support) throw std::invalid_argument("key outside support");
    return weights_.empty() ? 1.0 : weights_[key];
  }

  std::vector<Key> query(std::uint64_t qid) {
    CounterRng rng(derive_seed(spec_.seed, SeedDomain::kWorkloadQueries, qid));
    const std::uint64_t tag = qid + 1;
    std::vector<Key> out;
    out.reserve(spec_.query_size);
    while (out.size() < spec_.query_size) {
      const Key key = spec_.distribution == Distribution::kUniform
                          ? rng.next_below(spec_.support)
                          : draw_weighted(rng);
      if (stamp_[key] == tag) continue;
      stamp_[key] = tag;
      out.push_back(key);
    }
    return out;
  }

 private:
  void build_weights() {
    const std::uint64_t wseed =
        derive_seed(spec_.seed, SeedDomain::kWorkloadWeights);
    weights_.resize(spec_.support);
    for (std::uint64_t i = 0; i < spec_.support; ++i) {
      const double u = to_open_unit_interval(keyed_hash(wseed, i));
      weights_[i] = std::pow(u, -1.0 / spec_.shape);
    }
  }

  // Vose alias method over the static weights.
  void build_alias() {
    const std::uint64_t n = spec_.support;
    double total = 0.0;
    for (double w : weights_) total += w;
    accept_.resize(n);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::uint64_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      scaled[i] = weights_[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::uint64_t s = small.back();
      small.pop_back();
      const std::uint64_t l = large.back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint64_t i : large) accept_[i] = 1.0;
    for (std::uint64_t i : small) accept_[i] = 1.0;
  }

  Key draw_weighted(CounterRng& rng) const {
    const std::uint64_t slot = rng.next_below(spec_.support);
    return rng.next_unit() < accept_[slot] ? slot : alias_[slot];
  }

  WorkloadSpec spec_;
  std::vector<double> weights_;
  std::vector<double> accept_;
  std::vector<std::uint64_t> alias_;
  std::vector<std::uint64_t> stamp_;
};

// Per-key participation accounting: how many query sets and how many query
// sketches each key has appeared in. sketch_counts <= set_counts pointwise
// since sketch membership implies set membership.
class ParticipationTracker {
 public:
  void record(const std::vector<Key>& query, const BottomKSketch& sketch) {
    for (Key key : query) ++set_counts_[key];
    for (const auto& e : sketch.entries()) ++sketch_counts_[e.key];
  }

  std::uint64_t set_count(Key key) const { return lookup(set_counts_, key); }
  std::uint64_t sketch_count(Key key) const { return lookup(sketch_counts_, key); }

  std::uint64_t max_set_count() const { return max_value(set_counts_); }
  std::uint64_t max_sketch_count() const { return max_value(sketch_counts_); }

  const std::unordered_map<Key, std::uint64_t>& set_counts() const noexcept {
    return set_counts_;
  }
  const std::unordered_map<Key, std::uint64_t>& sketch_counts() const noexcept {
    return sketch_counts_;
  }

 private:
  static std::uint64_t lookup(const std::unordered_map<Key, std::uint64_t>& m,
                              Key key) {
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
  }
  static std::uint64_t max_value(
      const std::unordered_map<Key, std::uint64_t>& m) {
    std::uint64_t best = 0;
    for (const auto& [key, count] : m)
      if (count > best) best = count;
    return best;
  }

  std::unordered_map<Key, std::uint64_t> set_counts_;
  std::unordered_map<Key, std::uint64_t> sketch_counts_;
};

}  // namespace bottomk
