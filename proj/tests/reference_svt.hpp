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
//
// Deliberately naive transliteration of the individual-privacy-charging
// threshold test, used as the independent oracle for the charging-ledger
// tests. Dense arrays, explicit active set, no sharing with the library
// implementation.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace bktest {

class ReferenceSvt {
 public:
  ReferenceSvt(int n, int r) : r_(r), counters_(n, 0), active_(n, true) {}

  // h[i] in {0,1}; noise is supplied by the caller (pinned in tests).
  std::optional<double> above_threshold(const std::vector<int>& h, double t,
                                        double noise) {
    double hat = noise;
    for (std::size_t i = 0; i < h.size(); ++i)
      if (active_[i] && h[i] == 1) hat += 1.0;
    if (hat < t) return std::nullopt;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (active_[i] && h[i] == 1) {
        counters_[i] += 1;
        if (counters_[i] == r_) active_[i] = false;
      }
    }
    return hat;
  }

  const std::vector<int>& counters() const { return counters_; }
  const std::vector<bool>& active() const { return active_; }

  void force_state(const std::vector<int>& counters) {
    counters_ = counters;
    for (std::size_t i = 0; i < counters_.size(); ++i)
      active_[i] = counters_[i] < r_;
  }

 private:
  int r_;
  std::vector<int> counters_;
  std::vector<bool> active_;
};

}  // namespace bktest
