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

namespace bottomk {

using Key = std::uint64_t;

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer. Bijective on 64-bit values.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Keyed hash of x under seed. For any fixed seed this is a bijection in x,
// so two distinct keys never collide on the full 64-bit value.
constexpr std::uint64_t keyed_hash(std::uint64_t seed, std::uint64_t x) noexcept {
  return mix64(mix64(x * kGoldenGamma + 1) ^ seed);
}

// Top 53 bits mapped to [0, 1).
constexpr double to_unit_interval(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Midpoint variant on (0, 1); never returns an exact 0, which keeps
// inverse-CDF transforms finite.
constexpr double to_open_unit_interval(std::uint64_t h) noexcept {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// The library consumes one master seed; every independent randomness stream
// (priorities, Laplace noise, workload generation, attack partitions) derives
// its own seed under a distinct domain tag so the streams stay independent.
enum class SeedDomain : std::uint64_t {
  kSketchMap = 0x736b6574636800ULL,
  kNoise = 0x6e6f69736500ULL,
  kWorkloadWeights = 0x77656967687400ULL,
  kWorkloadQueries = 0x7175657279ULL,
  kAttackPartition = 0x706172746974ULL,
  kFingerprint = 0x66696e676572ULL,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, SeedDomain domain,
                                    std::uint64_t lane = 0) noexcept {
  return keyed_hash(mix64(static_cast<std::uint64_t>(domain)) ^ master, lane);
}

// Deterministic counter-based generator: draw j is a pure function of
// (seed, j). Streams with distinct seeds are independent for all practical
// purposes; no state beyond the counter.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept { return keyed_hash(seed_, counter_++); }

  double next_unit() noexcept { return to_unit_interval(next_u64()); }

  // Uniform integer in [0, bound) via the widening-multiply map.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace bottomk
