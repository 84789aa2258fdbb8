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
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "bottomk/accounting.hpp"
#include "bottomk/ledger.hpp"
#include "bottomk/noise.hpp"
#include "bottomk/sketch.hpp"

namespace bottomk {

// Recommended minimum sketch size for accuracy alpha under per-key budget r:
// ceil(k_constant * alpha^-2 * sqrt(r) * ln^{3/2}(n / beta)).
inline std::uint64_t required_k(double alpha, std::uint64_t r, std::uint64_t n,
                                double beta, double k_constant) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must be in (0,1)");
  if (r < 1) throw std::invalid_argument("budget r must be at least 1");
  if (n < 2) throw std::invalid_argument("universe size must be at least 2");
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must be in (0,1)");
  if (!(k_constant > 0)) throw std::invalid_argument("k constant must be positive");

  const double lg = std::log(static_cast<double>(n) / beta);
  return static_cast<std::uint64_t>(
      std::ceil(k_constant / (alpha * alpha) *
                std::sqrt(static_cast<double>(r)) * lg * std::sqrt(lg)));
}

// Diagnostic error radius alpha*E + c * alpha^-1 * sqrt(r) * ln^{3/2}(mn/beta)
// around an expected count E after m queries. The constant c is not pinned by
// any guarantee; callers pick it.
inline double error_budget(double alpha, double expected_count, std::uint64_t r,
                           std::uint64_t m, std::uint64_t n, double beta,
                           double c) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  const double lg =
      std::log(static_cast<double>(m) * static_cast<double>(n) / beta);
  return alpha * expected_count +
         c / alpha * std::sqrt(static_cast<double>(r)) * lg * std::sqrt(lg);
}

// How the per-test noise rate is derived from the configuration.
enum class NoiseRule {
  kBudget,    // epsilon_for_budget(r, alpha, beta, n, variant)
  kCapacity,  // epsilon_for_capacity(k, alpha, beta, variant)
};

// Parameters shared by both robust estimators. Construct through make(); the
// noise rate epsilon0 is derived from the chosen rule unless given
// explicitly.
struct EstimatorConfig {
  std::uint32_t k = 0;
  std::uint64_t r = 1;
  std::uint64_t n = 2;
  double alpha = 0.25;
  double beta = 0.1;
  EstimatorVariant variant = EstimatorVariant::kBasic;
  std::uint64_t seed = 0;
  double k_constant = 0.05;
  NoiseRule noise_rule = NoiseRule::kBudget;
  double epsilon0 = 0.0;

  static EstimatorConfig make(std::uint32_t k, std::uint64_t r, std::uint64_t n,
                              double alpha, double beta, EstimatorVariant variant,
                              std::uint64_t seed,
                              NoiseRule noise_rule = NoiseRule::kBudget,
                              double k_constant = 0.05,
                              std::optional<double> epsilon0 = std::nullopt) {
    if (k == 0) throw std::invalid_argument("sketch size must be positive");
    if (!(alpha > 0 && alpha <= 0.5))
      throw std::invalid_argument("alpha must be in (0, 0.5]");
    EstimatorConfig cfg;
    cfg.k = k;
    cfg.r = r;
    cfg.n = n;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.variant = variant;
    cfg.seed = seed;
    cfg.k_constant = k_constant;
    cfg.noise_rule = noise_rule;
    cfg.epsilon0 = epsilon0 ? *epsilon0
                   : noise_rule == NoiseRule::kBudget
                       ? epsilon_for_budget(r, alpha, beta, n, variant)
                       : epsilon_for_capacity(k, alpha, beta, variant);
    if (!(cfg.epsilon0 > 0))
      throw std::invalid_argument("epsilon0 must be positive");
    return cfg;
  }

  std::uint64_t map_fingerprint() const noexcept {
    return SketchRandomness::compute_fingerprint(seed, n);
  }

  // False when k is below the recommended size for (alpha, r, n, beta);
  // callers emit a warning, estimates still run.
  bool meets_recommended_k() const {
    return k >= required_k(alpha, r, n, beta, k_constant);
  }
};

// Record of one threshold sweep: the geometric tau grid that was tested and
// the outcome of each test (noisy count for the positive test, empty for the
// negatives). At most one entry of noisy_counts is set, and it is the last.
struct RobustQueryTrace {
  std::vector<double> taus_tested;
  std::vector<std::optional<double>> noisy_counts;
  double final_tau = 0.0;
  CardinalityEstimate output;
};

struct TrackingDiagnostics {
  // Sketch entries whose charge counter had already reached the budget,
  // measured before this query's own increments.
  std::uint32_t deactivated_in_sketch = 0;
  bool accurate_flag = false;  // d <= alpha k / 4
  bool degraded_flag = false;  // d > k / 2
};

namespace detail {

inline void check_fingerprint(const EstimatorConfig& cfg,
                              const BottomKSketch& s) {
  if (s.fingerprint() != cfg.map_fingerprint())
    throw IncompatibleSketchError(
        "incompatible sketch: built from a different sketching map");
  if (s.k() != cfg.k)
    throw IncompatibleSketchError("incompatible sketch: capacity mismatch");
}

}  // namespace detail

// Basic robust estimator. Exact answer below capacity; otherwise sweeps
// tau over the geometric grid k/(2n) * (1 + alpha/4)^j and returns T/tau for
// T = (1 - alpha) k at the first noisy count meeting T. Stateless across
// queries: concurrent calls on distinct noise streams are safe.
inline std::pair<CardinalityEstimate, RobustQueryTrace> robust_estimate(
    const EstimatorConfig& cfg, const BottomKSketch& s, NoiseStream& noise) {
  detail::check_fingerprint(cfg, s);

  RobustQueryTrace trace;
  if (s.size() < cfg.k) {
    trace.output = {static_cast<double>(s.size()), true, false};
    return {trace.output, trace};
  }

  const double threshold = (1.0 - cfg.alpha) * cfg.k;
  const double ratio = 1.0 + cfg.alpha / 4.0;
  double tau = static_cast<double>(cfg.k) / (2.0 * static_cast<double>(cfg.n));
  bool positive = false;
  while (tau < 1.0) {
    const double count = static_cast<double>(s.count_below(tau));
    const double noisy = count + sample_laplace(1.0 / cfg.epsilon0, noise);
    trace.taus_tested.push_back(tau);
    if (noisy >= threshold) {
      trace.noisy_counts.emplace_back(noisy);
      positive = true;
      break;
    }
    trace.noisy_counts.emplace_back(std::nullopt);
    tau *= ratio;
  }

  trace.final_tau = tau;
  trace.output = {threshold / tau, false, !positive};
  return {trace.output, trace};
}

// Tracking robust estimator. As the basic estimator but with T = k/4, grid
// ratio 1 + alpha/8, and the noisy count restricted to sketch entries whose
// charge counter is still below the budget. After the sweep, every sketch
// entry below the final tau is charged. The ledger is query-responder state
// only; sketches are never modified. Calls against one ledger must be
// serialized.
inline std::tuple<CardinalityEstimate, RobustQueryTrace, TrackingDiagnostics>
tracking_estimate(const EstimatorConfig& cfg, const BottomKSketch& s,
                  ChargeLedger& ledger, NoiseStream& noise) {
  detail::check_fingerprint(cfg, s);

  // Deactivation is static during the sweep (charging happens after it), so
  // one pass suffices: prefix_active[i] = active entries among the first i.
  const auto& entries = s.entries();
  std::vector<std::uint32_t> prefix_active(entries.size() + 1, 0);
  for (std::size_t i = 0; i < entries.size(); ++i)
    prefix_active[i + 1] =
        prefix_active[i] + (ledger.active(entries[i].key) ? 1u : 0u);
  const std::uint32_t deactivated =
      static_cast<std::uint32_t>(entries.size()) - prefix_active[entries.size()];

  TrackingDiagnostics diag;
  diag.deactivated_in_sketch = deactivated;
  diag.accurate_flag = deactivated <= cfg.alpha * cfg.k / 4.0;
  diag.degraded_flag = deactivated > cfg.k / 2.0;

  RobustQueryTrace trace;
  if (s.size() < cfg.k) {
    trace.output = {static_cast<double>(s.size()), true, false};
    return {trace.output, trace, diag};
  }

  const double threshold = static_cast<double>(cfg.k) / 4.0;
  const double ratio = 1.0 + cfg.alpha / 8.0;
  double tau = static_cast<double>(cfg.k) / (2.0 * static_cast<double>(cfg.n));
  bool positive = false;
  while (tau < 1.0) {
    const double count =
        static_cast<double>(prefix_active[s.count_below(tau)]);
    const double noisy = count + sample_laplace(1.0 / cfg.epsilon0, noise);
    trace.taus_tested.push_back(tau);
    if (noisy >= threshold) {
      trace.noisy_counts.emplace_back(noisy);
      positive = true;
      break;
    }
    trace.noisy_counts.emplace_back(std::nullopt);
    tau *= ratio;
  }

  for (const auto& e : entries)
    if (e.priority < tau) ledger.charge(e.key);

  trace.final_tau = tau;
  trace.output = {threshold / tau, false, !positive};
  return {trace.output, trace, diag};
}

}  // namespace bottomk
