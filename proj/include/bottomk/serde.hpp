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

#include <bit>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bottomk/accounting.hpp"
#include "bottomk/attack.hpp"
#include "bottomk/estimator.hpp"
#include "bottomk/experiment.hpp"
#include "bottomk/ledger.hpp"
#include "bottomk/sketch.hpp"
#include "bottomk/workload.hpp"

namespace bottomk {

using Json = nlohmann::json;

inline std::string to_hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t from_hex64(const std::string& s) {
  if (s.size() != 16) throw std::invalid_argument("expected 16 hex digits");
  std::uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9')
      v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f')
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F')
      v |= static_cast<std::uint64_t>(c - 'A' + 10);
    else
      throw std::invalid_argument("invalid hex digit");
  }
  return v;
}

// Priorities travel as the raw 64-bit pattern of the double so canonical
// ordering and merge results survive round-trips bit-exactly.
inline std::string priority_to_hex(double p) {
  return to_hex64(std::bit_cast<std::uint64_t>(p));
}
inline double priority_from_hex(const std::string& s) {
  return std::bit_cast<double>(from_hex64(s));
}

// --- sketch files ---------------------------------------------------------

inline Json sketch_to_json(const BottomKSketch& s) {
  Json entries = Json::array();
  for (const auto& e : s.entries())
    entries.push_back(Json::array({e.key, priority_to_hex(e.priority)}));
  return Json{{"seed_fingerprint", to_hex64(s.fingerprint())},
              {"k", s.k()},
              {"entries", std::move(entries)}};
}

inline BottomKSketch sketch_from_json(const Json& j) {
  std::vector<SketchEntry> entries;
  for (const auto& item : j.at("entries"))
    entries.push_back({item.at(0).get<Key>(),
                       priority_from_hex(item.at(1).get<std::string>())});
  return BottomKSketch::from_entries(j.at("k").get<std::uint32_t>(),
                                     from_hex64(j.at("seed_fingerprint")),
                                     std::move(entries));
}

// --- ledger snapshots ------------------------------------------------------

inline Json ledger_to_json(const ChargeLedger& ledger) {
  std::vector<std::pair<Key, std::uint32_t>> charges(ledger.charges().begin(),
                                                     ledger.charges().end());
  std::sort(charges.begin(), charges.end());
  Json items = Json::array();
  for (const auto& [key, count] : charges)
    items.push_back(Json::array({key, count}));
  return Json{{"r", ledger.budget()}, {"charges", std::move(items)}};
}

inline ChargeLedger ledger_from_json(const Json& j) {
  ChargeLedger ledger(j.at("r").get<std::uint32_t>());
  for (const auto& item : j.at("charges")) {
    const Key key = item.at(0).get<Key>();
    const auto count = item.at(1).get<std::uint32_t>();
    if (count > ledger.budget())
      throw std::invalid_argument("charge count exceeds budget");
    for (std::uint32_t c = 0; c < count; ++c) ledger.charge(key);
  }
  return ledger;
}

// --- estimator configs -----------------------------------------------------

inline std::string variant_name(EstimatorVariant v) {
  return v == EstimatorVariant::kBasic ? "basic" : "tracking";
}
inline EstimatorVariant variant_from_name(const std::string& name) {
  if (name == "basic") return EstimatorVariant::kBasic;
  if (name == "tracking") return EstimatorVariant::kTracking;
  throw std::invalid_argument("unknown estimator variant: " + name);
}

inline std::string noise_rule_name(NoiseRule r) {
  return r == NoiseRule::kBudget ? "budget" : "capacity";
}
inline NoiseRule noise_rule_from_name(const std::string& name) {
  if (name == "budget") return NoiseRule::kBudget;
  if (name == "capacity") return NoiseRule::kCapacity;
  throw std::invalid_argument("unknown noise rule: " + name);
}

inline Json estimator_config_to_json(const EstimatorConfig& cfg) {
  return Json{{"k", cfg.k},
              {"r", cfg.r},
              {"n", cfg.n},
              {"alpha", cfg.alpha},
              {"beta", cfg.beta},
              {"variant", variant_name(cfg.variant)},
              {"seed", cfg.seed},
              {"k_constant", cfg.k_constant},
              {"noise_rule", noise_rule_name(cfg.noise_rule)},
              {"epsilon0", cfg.epsilon0}};
}

inline EstimatorConfig estimator_config_from_json(const Json& j) {
  std::optional<double> epsilon0;
  if (j.contains("epsilon0")) epsilon0 = j.at("epsilon0").get<double>();
  return EstimatorConfig::make(
      j.at("k").get<std::uint32_t>(), j.at("r").get<std::uint64_t>(),
      j.at("n").get<std::uint64_t>(), j.at("alpha").get<double>(),
      j.at("beta").get<double>(),
      variant_from_name(j.at("variant").get<std::string>()),
      j.at("seed").get<std::uint64_t>(),
      noise_rule_from_name(j.value("noise_rule", "budget")),
      j.value("k_constant", 0.05), epsilon0);
}

// --- workload specs --------------------------------------------------------

inline Json workload_spec_to_json(const WorkloadSpec& spec) {
  Json j{{"distribution",
          spec.distribution == Distribution::kUniform ? "uniform" : "pareto"},
         {"support", spec.support},
         {"query_size", spec.query_size},
         {"num_queries", spec.num_queries},
         {"seed", spec.seed}};
  if (spec.distribution == Distribution::kPareto) j["shape"] = spec.shape;
  return j;
}

inline WorkloadSpec workload_spec_from_json(const Json& j) {
  WorkloadSpec spec;
  const std::string name = j.at("distribution").get<std::string>();
  if (name == "uniform") {
    spec.distribution = Distribution::kUniform;
  } else if (name == "pareto") {
    spec.distribution = Distribution::kPareto;
    spec.shape = j.at("shape").get<double>();
  } else {
    throw std::invalid_argument("unknown distribution: " + name);
  }
  spec.support = j.at("support").get<std::uint64_t>();
  spec.query_size = j.at("query_size").get<std::uint32_t>();
  spec.num_queries = j.value("num_queries", std::uint64_t{0});
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

// --- privacy accounting ----------------------------------------------------

inline Json privacy_bounds_to_json(const PrivacyBounds& b) {
  return Json{{"q", b.q},
              {"delta_star", b.delta_star},
              {"pure", Json{{"epsilon", b.pure_epsilon}, {"delta", b.pure_delta}}},
              {"approx", Json{{"epsilon", b.approx_epsilon},
                              {"delta", b.approx_delta}}}};
}

// --- estimate responses ----------------------------------------------------

inline Json estimate_response_to_json(
    const CardinalityEstimate& est,
    std::optional<std::uint32_t> deactivated = std::nullopt) {
  Json j{{"estimate", est.value},
         {"exact", est.exact},
         {"saturated", est.saturated}};
  j["deactivated"] = deactivated ? Json(*deactivated) : Json(nullptr);
  return j;
}

// --- attack configs / reports / transcripts --------------------------------

inline Json attack_config_to_json(const AttackConfig& cfg) {
  return Json{{"universe", cfg.universe},
              {"k", cfg.k},
              {"rounds", cfg.rounds},
              {"removal_fraction", cfg.removal_fraction},
              {"seed", cfg.seed}};
}

inline AttackConfig attack_config_from_json(const Json& j) {
  AttackConfig cfg;
  cfg.universe = j.at("universe").get<std::uint64_t>();
  cfg.k = j.at("k").get<std::uint32_t>();
  cfg.rounds = j.at("rounds").get<std::uint32_t>();
  cfg.removal_fraction = j.at("removal_fraction").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

inline Json attack_report_to_json(const AttackConfig& cfg,
                                  const AttackReport& report) {
  return Json{{"config", attack_config_to_json(cfg)},
              {"queries_used", report.queries_used},
              {"removed_keys", report.removed_keys},
              {"final_true_cardinality", report.final_true_cardinality},
              {"final_estimate", report.final_estimate},
              {"relative_error", report.relative_error}};
}

inline Json transcript_entry_to_json(const TranscriptEntry& e) {
  return Json{{"qid", e.qid}, {"size", e.size}, {"estimate", e.estimate}};
}

inline TranscriptEntry transcript_entry_from_json(const Json& j) {
  return {j.at("qid").get<std::uint64_t>(), j.at("size").get<std::uint64_t>(),
          j.at("estimate").get<double>()};
}

// --- experiment configs ----------------------------------------------------

inline Json experiment_config_to_json(const ExperimentConfig& cfg) {
  Json dists = Json::array();
  for (const auto& d : cfg.distributions) {
    Json item{{"distribution", d.distribution == Distribution::kUniform
                                   ? "uniform"
                                   : "pareto"}};
    if (d.distribution == Distribution::kPareto) item["shape"] = d.shape;
    dists.push_back(std::move(item));
  }
  return Json{{"k_values", cfg.k_values},
              {"distributions", std::move(dists)},
              {"r_coefficient", cfg.r_coefficient},
              {"accurate_threshold", cfg.accurate_threshold},
              {"stop_threshold", cfg.stop_threshold},
              {"alpha", cfg.alpha},
              {"beta", cfg.beta},
              {"support", cfg.support},
              {"query_size", cfg.query_size},
              {"seed", cfg.seed},
              {"max_queries", cfg.max_queries},
              {"trials", cfg.trials},
              {"noise_rule", noise_rule_name(cfg.noise_rule)}};
}

inline ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.k_values = j.at("k_values").get<std::vector<std::uint32_t>>();
  for (const auto& item : j.at("distributions")) {
    DistributionSpec d;
    const std::string name = item.at("distribution").get<std::string>();
    if (name == "uniform") {
      d.distribution = Distribution::kUniform;
    } else if (name == "pareto") {
      d.distribution = Distribution::kPareto;
      d.shape = item.at("shape").get<double>();
    } else {
      throw std::invalid_argument("unknown distribution: " + name);
    }
    cfg.distributions.push_back(d);
  }
  cfg.r_coefficient = j.value("r_coefficient", 0.002);
  cfg.accurate_threshold = j.value("accurate_threshold", 0.10);
  cfg.stop_threshold = j.value("stop_threshold", 0.50);
  cfg.alpha = j.value("alpha", 0.25);
  cfg.beta = j.value("beta", 0.1);
  cfg.support = j.value("support", std::uint64_t{1'000'000});
  cfg.query_size = j.value("query_size", std::uint32_t{5'000});
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.max_queries = j.value("max_queries", std::uint64_t{1'000'000});
  cfg.trials = j.value("trials", std::uint32_t{1});
  cfg.noise_rule = noise_rule_from_name(j.value("noise_rule", "capacity"));
  cfg.validate();
  return cfg;
}

}  // namespace bottomk
