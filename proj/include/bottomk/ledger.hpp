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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bottomk/hash.hpp"
#include "bottomk/noise.hpp"

namespace bottomk {

// Per-key charge counters with budget r. A key whose counter reaches r is
// deactivated and never reactivated. Storage is a sparse map: the universe
// can be 1e6+ while only ~k keys are touched per query.
//
// Single-writer: threshold tests against one ledger must be externally
// serialized. Distinct ledgers are independent.
class ChargeLedger {
 public:
  explicit ChargeLedger(std::uint32_t budget) : budget_(budget) {
    if (budget == 0) throw std::invalid_argument("charge budget must be positive");
  }

  std::uint32_t budget() const noexcept { return budget_; }

  std::uint32_t charge_count(Key key) const noexcept {
    auto it = charges_.find(key);
    return it == charges_.end() ? 0 : it->second;
  }

  bool active(Key key) const noexcept { return charge_count(key) < budget_; }
  bool deactivated(Key key) const noexcept { return !active(key); }

  // Saturating increment: counters never exceed the budget.
  void charge(Key key) {
    auto& c = charges_[key];
    if (c < budget_) ++c;
  }

  const std::unordered_map<Key, std::uint32_t>& charges() const noexcept {
    return charges_;
  }

 private:
  std::uint32_t budget_;
  std::unordered_map<Key, std::uint32_t> charges_;
};

// A linear threshold test: per-key 0/1 contributions, a threshold, and the
// per-test noise rate. Each key appears at most once.
struct ThresholdQuery {
  std::vector<std::pair<Key, bool>> contributions;
  double threshold = 0.0;
  double epsilon = 1.0;
};

struct ThresholdOutcome {
  // Noisy count when it met the threshold; empty is the below-threshold
  // "bottom" result.
  std::optional<double> value;
  // Recorded for replay tests.
  double noise_used = 0.0;

  bool positive() const noexcept { return value.has_value(); }
};

// Noisy above-threshold test with individual privacy charging. Sums the
// contributions of active keys, adds Laplace(1/epsilon), and compares against
// the threshold. A positive outcome charges every active contributing key
// (deactivating those that reach the budget) and releases the noisy count; a
// negative outcome leaves the ledger untouched and releases nothing.
inline ThresholdOutcome above_threshold(ChargeLedger& ledger,
                                        const ThresholdQuery& query,
                                        NoiseStream& stream) {
  double raw = 0.0;
  for (const auto& [key, indicator] : query.contributions)
    if (indicator && ledger.active(key)) raw += 1.0;

  const double noise = sample_laplace(1.0 / query.epsilon, stream);
  const double noisy = raw + noise;
  if (noisy < query.threshold) return {std::nullopt, noise};

  for (const auto& [key, indicator] : query.contributions)
    if (indicator && ledger.active(key)) ledger.charge(key);
  return {noisy, noise};
}

}  // namespace bottomk
