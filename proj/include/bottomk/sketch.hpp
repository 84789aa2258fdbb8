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
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "bottomk/randomness.hpp"

namespace bottomk {

// Raised when sketches built with different capacities or different sketching
// maps are combined. The message is stable ("incompatible sketches...") and
// surfaced verbatim by the CLI.
class IncompatibleSketchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SketchEntry {
  Key key;
  double priority;

  friend bool operator==(const SketchEntry&, const SketchEntry&) = default;
};

// Ascending (priority, key id); the key id breaks the astronomically rare
// priority tie so every order statistic is uniquely determined.
inline bool entry_less(const SketchEntry& a, const SketchEntry& b) noexcept {
  if (a.priority != b.priority) return a.priority < b.priority;
  return a.key < b.key;
}

struct CardinalityEstimate {
  double value = 0.0;
  // True iff the estimator returned the exact set size (|S| < k branch).
  bool exact = false;
  // Robust estimators only: the threshold sweep ran off the end of [0, 1)
  // without a positive test. The standard estimator never sets it.
  bool saturated = false;
};

// The <= k lowest-priority (key, priority) pairs of a set, sorted ascending
// by (priority, key). Immutable value type; merging two sketches of U and V
// yields exactly the sketch of U union V.
class BottomKSketch {
 public:
  static BottomKSketch from_entries(std::uint32_t k, std::uint64_t fingerprint,
                                    std::vector<SketchEntry> entries) {
    if (k == 0) throw std::invalid_argument("sketch capacity must be positive");
    if (entries.size() > k)
      throw std::invalid_argument("sketch holds more than k entries");
    if (!std::is_sorted(entries.begin(), entries.end(), entry_less))
      throw std::invalid_argument("sketch entries not in canonical order");
    for (std::size_t i = 1; i < entries.size(); ++i)
      if (entries[i].key == entries[i - 1].key)
        throw std::invalid_argument("duplicate key in sketch");
    return BottomKSketch(k, fingerprint, std::move(entries));
  }

  std::uint32_t k() const noexcept { return k_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  const std::vector<SketchEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool full() const noexcept { return entries_.size() == k_; }

  // kth smallest priority of the sketched set (only meaningful when full).
  double tau() const noexcept { return entries_.back().priority; }

  // Number of entries with priority strictly below tau; binary search over
  // the sorted entries.
  std::size_t count_below(double tau) const noexcept {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), tau,
        [](const SketchEntry& e, double t) { return e.priority < t; });
    return static_cast<std::size_t>(it - entries_.begin());
  }

  friend bool operator==(const BottomKSketch&, const BottomKSketch&) = default;

 private:
  BottomKSketch(std::uint32_t k, std::uint64_t fingerprint,
                std::vector<SketchEntry> entries)
      : k_(k), fingerprint_(fingerprint), entries_(std::move(entries)) {}

  std::uint32_t k_;
  std::uint64_t fingerprint_;
  std::vector<SketchEntry> entries_;
};

// Builds the bottom-k sketch of `keys` in one pass: O(|keys| log k) time and
// O(k) working memory. Repeated keys collapse to one entry.
template <typename KeyRange>
BottomKSketch sketch_set(const SketchRandomness& rand, const KeyRange& keys,
                         std::uint32_t k) {
  if (k == 0) throw std::invalid_argument("sketch capacity must be positive");

  // Max-heap on (priority, key): the top is the current kth order statistic.
  std::vector<SketchEntry> heap;
  heap.reserve(k);
  std::unordered_set<Key> in_heap;
  in_heap.reserve(2 * static_cast<std::size_t>(k));

  for (const Key key : keys) {
    const SketchEntry cand{key, rand.priority(key)};
    if (heap.size() < k) {
      if (!in_heap.insert(key).second) continue;
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end(), entry_less);
    } else if (entry_less(cand, heap.front())) {
      if (in_heap.count(key)) continue;
      in_heap.erase(heap.front().key);
      in_heap.insert(key);
      std::pop_heap(heap.begin(), heap.end(), entry_less);
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end(), entry_less);
    }
  }

  std::sort(heap.begin(), heap.end(), entry_less);
  return BottomKSketch::from_entries(k, rand.fingerprint(), std::move(heap));
}

// Sketch of the union: merge-walk of the two sorted entry lists, truncated to
// the k smallest. Equals sketch_set of the union bit-exactly.
inline BottomKSketch merge(const BottomKSketch& a, const BottomKSketch& b) {
  if (a.k() != b.k())
    throw IncompatibleSketchError("incompatible sketches: capacity mismatch");
  if (a.fingerprint() != b.fingerprint())
    throw IncompatibleSketchError(
        "incompatible sketches: sketching-map fingerprint mismatch");

  std::vector<SketchEntry> out;
  out.reserve(a.k());
  auto ia = a.entries().begin(), ea = a.entries().end();
  auto ib = b.entries().begin(), eb = b.entries().end();
  while (out.size() < a.k() && (ia != ea || ib != eb)) {
    if (ib == eb) {
      out.push_back(*ia++);
    } else if (ia == ea) {
      out.push_back(*ib++);
    } else if (ia->key == ib->key) {
      out.push_back(*ia++);
      ++ib;
    } else if (entry_less(*ia, *ib)) {
      out.push_back(*ia++);
    } else {
      out.push_back(*ib++);
    }
  }
  return BottomKSketch::from_entries(a.k(), a.fingerprint(), std::move(out));
}

// Standard estimator: exact count below capacity, otherwise (k-1)/tau with
// tau the kth smallest priority.
inline CardinalityEstimate std_estimate(const BottomKSketch& s) {
  if (s.size() < s.k())
    return {static_cast<double>(s.size()), /*exact=*/true, /*saturated=*/false};
  return {static_cast<double>(s.k() - 1) / s.tau(), false, false};
}

}  // namespace bottomk
