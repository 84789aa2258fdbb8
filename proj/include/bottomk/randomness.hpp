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
#include <stdexcept>

#include "bottomk/hash.hpp"

namespace bottomk {

// The sketching map's randomness: a deterministic assignment of a priority in
// [0, 1) to every key of the ground set [0, n). Priorities have 53-bit
// resolution and are pairwise distinct on the underlying 64-bit values; the
// rare 53-bit collision is handled downstream by tie-breaking on key id.
//
// Immutable after construction; safe to share across threads.
class SketchRandomness {
 public:
  SketchRandomness(std::uint64_t seed, std::uint64_t n)
      : map_seed_(derive_seed(seed, SeedDomain::kSketchMap)),
        n_(n),
        fingerprint_(compute_fingerprint(seed, n)) {
    if (n == 0) throw std::invalid_argument("ground-set size must be positive");
  }

  double priority(Key key) const {
    if (key >= n_) throw std::invalid_argument("key outside ground set");
    return to_unit_interval(keyed_hash(map_seed_, key));
  }

  // Unchecked variant for hot loops that already guarantee key < n.
  double priority_unchecked(Key key) const noexcept {
    return to_unit_interval(keyed_hash(map_seed_, key));
  }

  std::uint64_t n() const noexcept { return n_; }

  // Binds (seed, n); sketches carry it so that merging summaries built from
  // different maps is detected instead of silently producing garbage.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  static std::uint64_t compute_fingerprint(std::uint64_t seed,
                                           std::uint64_t n) noexcept {
    return keyed_hash(derive_seed(seed, SeedDomain::kFingerprint), n);
  }

 private:
  std::uint64_t map_seed_;
  std::uint64_t n_;
  std::uint64_t fingerprint_;
};

}  // namespace bottomk
