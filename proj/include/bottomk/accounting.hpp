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

namespace bottomk {

// Closed-form privacy accounting for a charging budget of r positive tests
// per key at per-test rate epsilon. All logarithms are natural.
struct PrivacyBounds {
  double pure_epsilon = 0.0;    // (pure_epsilon, delta_star)
  double pure_delta = 0.0;
  double approx_epsilon = 0.0;  // (approx_epsilon, delta + delta_star)
  double approx_delta = 0.0;
  double q = 0.0;               // 1 / (e^epsilon + 1)
  double delta_star = 0.0;      // e^{-alpha^2 r / (2 (1 + alpha))}
};

inline PrivacyBounds privacy_bounds(std::uint64_t r, double epsilon,
                                    double alpha, double delta) {
  if (r < 1) throw std::invalid_argument("budget r must be at least 1");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must be in (0,1)");

  PrivacyBounds b;
  b.q = 1.0 / (std::exp(epsilon) + 1.0);
  b.delta_star = std::exp(-alpha * alpha * static_cast<double>(r) /
                          (2.0 * (1.0 + alpha)));
  const double rq = static_cast<double>(r) / b.q;
  b.pure_epsilon = (1.0 + alpha) * rq * epsilon;
  b.pure_delta = b.delta_star;
  b.approx_epsilon = 0.5 * (1.0 + alpha) * rq * epsilon * epsilon +
                     epsilon * std::sqrt((1.0 + alpha) * rq * std::log(1.0 / delta));
  b.approx_delta = delta + b.delta_star;
  return b;
}

enum class EstimatorVariant { kBasic, kTracking };

// Per-test noise rate sized for a per-key budget of r positive tests:
// (alpha/8) / (4 sqrt(r ln(n/(beta/4)))) for the basic estimator and half
// that for the tracking estimator. Worst-case calibration; see
// epsilon_for_capacity for the rate a deployed sketch size can actually
// absorb.
inline double epsilon_for_budget(std::uint64_t r, double alpha, double beta,
                                 std::uint64_t n, EstimatorVariant variant) {
  if (r < 1) throw std::invalid_argument("budget r must be at least 1");
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must be in (0,1)");
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must be in (0,1)");
  if (n < 2) throw std::invalid_argument("universe size must be at least 2");

  const double slack = variant == EstimatorVariant::kBasic ? alpha / 8 : alpha / 16;
  return slack /
         (4.0 * std::sqrt(static_cast<double>(r) *
                          std::log(static_cast<double>(n) / (beta / 4))));
}

// Largest per-test noise rate whose high-probability tail stays inside the
// error allowance of a sketch of size k (alpha k / 8 for the basic variant,
// alpha k / 16 for tracking) across test_budget threshold tests at confidence
// 1 - beta. The worst-case rate from epsilon_for_budget is calibrated for
// k values orders of magnitude beyond practical sketch sizes; this is the
// rate at which the deployed estimator is actually operable.
inline double epsilon_for_capacity(std::uint32_t k, double alpha, double beta,
                                   EstimatorVariant variant,
                                   double test_budget = 1e6) {
  if (k < 1) throw std::invalid_argument("sketch size must be at least 1");
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must be in (0,1)");
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must be in (0,1)");
  if (!(test_budget >= 1)) throw std::invalid_argument("test budget must be at least 1");

  const double allowance =
      variant == EstimatorVariant::kBasic ? alpha * k / 8 : alpha * k / 16;
  return std::log(2.0 * test_budget / beta) / allowance;
}

}  // namespace bottomk
