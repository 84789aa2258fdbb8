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
#include <cstdio>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bottomk/estimator.hpp"
#include "bottomk/workload.hpp"

namespace bottomk {

struct DistributionSpec {
  Distribution distribution = Distribution::kUniform;
  double shape = 2.0;  // Pareto only

  std::string label() const {
    if (distribution == Distribution::kUniform) return "uniform";
    char buf[32];
    std::snprintf(buf, sizeof buf, "pareto-%g", shape);
    return buf;
  }
};

// Sweep configuration: for each sketch size k the tracking estimator runs over
// the generated workload with per-key budget r = floor(r_coefficient * k^2),
// counting queries whose sketch has at most accurate_threshold * k
// deactivated entries and halting at the first query with at least
// stop_threshold * k of them (or at max_queries). The baseline column is the
// analytic per-query allotment floor(r_coefficient * k^2), not a measurement.
struct ExperimentConfig {
  std::vector<std::uint32_t> k_values;
  std::vector<DistributionSpec> distributions;
  double r_coefficient = 0.002;
  double accurate_threshold = 0.10;
  double stop_threshold = 0.50;
  double alpha = 0.25;
  double beta = 0.1;
  std::uint64_t support = 1'000'000;
  std::uint32_t query_size = 5'000;
  std::uint64_t seed = 1;
  std::uint64_t max_queries = 1'000'000;
  std::uint32_t trials = 1;
  NoiseRule noise_rule = NoiseRule::kCapacity;

  void validate() const {
    if (k_values.empty()) throw std::invalid_argument("no sketch sizes given");
    if (distributions.empty()) throw std::invalid_argument("no distributions given");
    if (!(accurate_threshold > 0 && accurate_threshold < stop_threshold &&
          stop_threshold <= 1))
      throw std::invalid_argument(
          "thresholds must satisfy 0 < accurate < stop <= 1");
    if (!(r_coefficient > 0))
      throw std::invalid_argument("r coefficient must be positive");
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    if (max_queries == 0) throw std::invalid_argument("max queries must be positive");
  }
};

struct ExperimentRow {
  std::uint32_t k = 0;
  std::string distribution;
  std::uint64_t baseline_queries = 0;
  std::uint64_t robust_queries = 0;
  double gain = 0.0;
  bool capped = false;  // hit max_queries before the stop threshold
  std::uint32_t trial = 0;
};

// The analytic baseline allotment floor(c * k^2).
inline std::uint64_t r_floor(double coefficient, std::uint32_t k) {
  return static_cast<std::uint64_t>(
      std::floor(coefficient * static_cast<double>(k) * static_cast<double>(k)));
}

namespace detail {

inline ExperimentRow run_single(const ExperimentConfig& cfg,
                                const DistributionSpec& dist, std::uint32_t k,
                                std::uint32_t trial, std::uint32_t dist_index) {
  const std::uint64_t r = r_floor(cfg.r_coefficient, k);
  if (r == 0)
    throw std::invalid_argument("per-key budget rounds to zero; increase k");

  const std::uint64_t run_seed = keyed_hash(
      keyed_hash(cfg.seed, dist_index),
      static_cast<std::uint64_t>(k) | (static_cast<std::uint64_t>(trial) << 32));

  WorkloadSpec wspec;
  wspec.distribution = dist.distribution;
  wspec.shape = dist.shape;
  wspec.support = cfg.support;
  wspec.query_size = cfg.query_size;
  wspec.num_queries = cfg.max_queries;
  wspec.seed = run_seed;
  WorkloadStream stream(wspec);

  const SketchRandomness rand(run_seed, cfg.support);
  const EstimatorConfig est = EstimatorConfig::make(
      k, r, cfg.support, cfg.alpha, cfg.beta, EstimatorVariant::kTracking,
      run_seed, cfg.noise_rule);
  ChargeLedger ledger(static_cast<std::uint32_t>(r));
  NoiseStream noise(run_seed);

  ExperimentRow row;
  row.k = k;
  row.distribution = dist.label();
  row.baseline_queries = r;
  row.trial = trial;
  row.capped = true;
  for (std::uint64_t qid = 0; qid < cfg.max_queries; ++qid) {
    const std::vector<Key> query = stream.query(qid);
    const BottomKSketch sketch = sketch_set(rand, query, k);
    const auto [estimate, trace, diag] =
        tracking_estimate(est, sketch, ledger, noise);
    if (diag.deactivated_in_sketch <= cfg.accurate_threshold * k)
      ++row.robust_queries;
    if (diag.deactivated_in_sketch >= cfg.stop_threshold * k) {
      row.capped = false;
      break;
    }
  }
  row.gain = static_cast<double>(row.robust_queries) /
             static_cast<double>(row.baseline_queries);
  return row;
}

}  // namespace detail

// Runs the full sweep. Runs are independent (each owns its ledger, workload
// stream, and noise stream) and execute on up to `threads` workers; the
// returned rows are sorted by (distribution, k, trial) regardless of
// scheduling. Failures carry the offending (k, distribution) in the message.
inline std::vector<ExperimentRow> run_experiment(
    const ExperimentConfig& cfg,
    unsigned threads = std::thread::hardware_concurrency()) {
  cfg.validate();

  struct Task {
    DistributionSpec dist;
    std::uint32_t k;
    std::uint32_t trial;
    std::uint32_t dist_index;
  };
  std::vector<Task> tasks;
  for (std::uint32_t di = 0; di < cfg.distributions.size(); ++di)
    for (std::uint32_t k : cfg.k_values)
      for (std::uint32_t t = 0; t < cfg.trials; ++t)
        tasks.push_back({cfg.distributions[di], k, t, di});

  auto run_task = [&cfg](const Task& task) {
    try {
      return detail::run_single(cfg, task.dist, task.k, task.trial,
                                task.dist_index);
    } catch (const std::exception& e) {
      throw std::runtime_error("experiment run (k=" + std::to_string(task.k) +
                               ", " + task.dist.label() + "): " + e.what());
    }
  };

  std::vector<ExperimentRow> rows;
  if (threads <= 1 || tasks.size() <= 1) {
    for (const Task& task : tasks) rows.push_back(run_task(task));
  } else {
    std::vector<std::future<ExperimentRow>> futures;
    futures.reserve(tasks.size());
    for (const Task& task : tasks)
      futures.push_back(std::async(std::launch::async, run_task, task));
    for (auto& f : futures) rows.push_back(f.get());
  }

  std::sort(rows.begin(), rows.end(),
            [](const ExperimentRow& a, const ExperimentRow& b) {
              if (a.distribution != b.distribution)
                return a.distribution < b.distribution;
              if (a.k != b.k) return a.k < b.k;
              return a.trial < b.trial;
            });
  return rows;
}

inline std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = "k,distribution,baseline_queries,robust_queries,gain,capped\n";
  char buf[160];
  for (const ExperimentRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%u,%s,%llu,%llu,%.10g,%s\n", row.k,
                  row.distribution.c_str(),
                  static_cast<unsigned long long>(row.baseline_queries),
                  static_cast<unsigned long long>(row.robust_queries), row.gain,
                  row.capped ? "1" : "");
    out += buf;
  }
  return out;
}

}  // namespace bottomk
