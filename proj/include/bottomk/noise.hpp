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

#include "bottomk/hash.hpp"

namespace bottomk {

// Deterministic Laplace-noise source. Draw j is a pure function of
// (seed, lane, j); the seed is domain-separated from the sketching map so
// noise is independent of priorities even when both come from one master
// seed.
//
// A pinned stream returns a fixed value from every draw; trace and replay
// tests are impossible without it. Not for production estimates.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t master_seed, std::uint64_t lane = 0)
      : seed_(derive_seed(master_seed, SeedDomain::kNoise, lane)) {}

  static NoiseStream pinned(double value) {
    NoiseStream s(0);
    s.pinned_ = value;
    return s;
  }

  bool is_pinned() const noexcept { return pinned_.has_value(); }
  double pinned_value() const { return pinned_.value(); }

  std::uint64_t counter() const noexcept { return counter_; }
  void set_counter(std::uint64_t c) noexcept { counter_ = c; }

  // Uniform on (0, 1), strictly interior on both sides.
  double next_uniform() noexcept {
    return to_open_unit_interval(keyed_hash(seed_, counter_++));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> pinned_;
};

// One Laplace(0, scale) draw by inverse CDF; advances the stream counter.
inline double sample_laplace(double scale, NoiseStream& stream) {
  if (!(scale > 0)) throw std::invalid_argument("laplace scale must be positive");
  if (stream.is_pinned()) {
    stream.set_counter(stream.counter() + 1);
    return stream.pinned_value();
  }
  const double w = stream.next_uniform() - 0.5;
  return w < 0 ? scale * std::log1p(2 * w) : -scale * std::log1p(-2 * w);
}

}  // namespace bottomk
