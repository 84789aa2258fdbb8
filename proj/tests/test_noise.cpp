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

#include "bottomk/noise.hpp"

#include <cmath>

#include "gtest/gtest.h"

namespace bottomk {
namespace {

TEST(SampleLaplace, RejectsNonPositiveScale) {
  NoiseStream stream(1);
  EXPECT_THROW(sample_laplace(0.0, stream), std::invalid_argument);
  EXPECT_THROW(sample_laplace(-1.0, stream), std::invalid_argument);
}

TEST(SampleLaplace, DeterministicInSeedAndCounter) {
  NoiseStream a(42), b(42);
  for (int i = 0; i < 16; ++i)
    EXPECT_EQ(sample_laplace(1.0, a), sample_laplace(1.0, b));

  NoiseStream c(42);
  c.set_counter(7);
  NoiseStream d(42);
  d.set_counter(7);
  EXPECT_EQ(sample_laplace(2.0, c), sample_laplace(2.0, d));
}

TEST(SampleLaplace, AdvancesCounter) {
  NoiseStream stream(9);
  EXPECT_EQ(stream.counter(), 0u);
  sample_laplace(1.0, stream);
  sample_laplace(1.0, stream);
  EXPECT_EQ(stream.counter(), 2u);
}

// Mean of 1e6 draws at scale 1: std of the mean is sqrt(2)/1e3, the 0.005
// band is ~3.5 sigma.
TEST(SampleLaplace, EmpiricalMeanIsZero) {
  NoiseStream stream(3);
  const int draws = 1'000'000;
  double sum = 0;
  for (int i = 0; i < draws; ++i) sum += sample_laplace(1.0, stream);
  EXPECT_NEAR(sum / draws, 0.0, 0.005);
}

// Tail mass: Pr[|X| > scale ln 20] = 1/20.
TEST(SampleLaplace, EmpiricalTailMass) {
  NoiseStream stream(4);
  const double scale = 1.7;
  const double cut = scale * std::log(20.0);
  const int draws = 1'000'000;
  int outside = 0;
  for (int i = 0; i < draws; ++i)
    if (std::abs(sample_laplace(scale, stream)) > cut) ++outside;
  EXPECT_NEAR(static_cast<double>(outside) / draws, 0.05, 0.003);
}

TEST(SampleLaplace, ScaleParameterScalesDraws) {
  NoiseStream a(11), b(11);
  for (int i = 0; i < 100; ++i)
    EXPECT_DOUBLE_EQ(3.0 * sample_laplace(1.0, a), sample_laplace(3.0, b));
}

TEST(NoiseStream, PinnedModeReturnsFixedValue) {
  NoiseStream pinned = NoiseStream::pinned(-2.5);
  EXPECT_TRUE(pinned.is_pinned());
  for (int i = 0; i < 5; ++i) EXPECT_EQ(sample_laplace(100.0, pinned), -2.5);
  EXPECT_EQ(pinned.counter(), 5u);
}

TEST(NoiseStream, IndependentLanes) {
  NoiseStream a(42, 0), b(42, 1);
  EXPECT_NE(sample_laplace(1.0, a), sample_laplace(1.0, b));
}

}  // namespace
}  // namespace bottomk
