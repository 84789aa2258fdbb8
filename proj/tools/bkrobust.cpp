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
// Command-line front end: sketch construction and merging, estimator queries,
// attack runs and replays, privacy accounting, and the deactivation-gain
// experiment sweep. All randomness hangs off a single --seed (or the seed in
// a config file), expanded internally through domain-tagged derivation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bottomk/attack.hpp"
#include "bottomk/experiment.hpp"
#include "bottomk/serde.hpp"

namespace {

using namespace bottomk;

std::string read_stream(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string read_file(const std::string& path) {
  if (path == "-") return read_stream(std::cin);
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_stream(f);
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
}

Json load_json(const std::string& path) { return Json::parse(read_file(path)); }

void warn_small_k(const EstimatorConfig& cfg) {
  if (!cfg.meets_recommended_k())
    std::cerr << "warning: k=" << cfg.k << " is below the recommended "
              << required_k(cfg.alpha, cfg.r, cfg.n, cfg.beta, cfg.k_constant)
              << " for alpha=" << cfg.alpha << ", r=" << cfg.r << "\n";
}

// Builds the oracle for a named estimator. The tracking variant owns its
// ledger and noise stream; queries through one oracle are serialized.
struct OracleBundle {
  CardinalityOracle oracle;
  std::shared_ptr<SketchRandomness> rand;
  std::shared_ptr<ChargeLedger> ledger;
  std::shared_ptr<NoiseStream> noise;
  std::shared_ptr<EstimatorConfig> cfg;
};

OracleBundle make_oracle(const std::string& estimator, std::uint64_t universe,
                         std::uint32_t k, std::uint64_t seed,
                         const std::optional<Json>& est_config) {
  OracleBundle bundle;
  if (estimator == "std") {
    bundle.rand = std::make_shared<SketchRandomness>(seed, universe);
    auto rand = bundle.rand;
    bundle.oracle = [rand, k](std::span<const Key> keys) {
      return std_estimate(sketch_set(*rand, keys, k)).value;
    };
    return bundle;
  }
  if (!est_config)
    throw std::runtime_error("estimator '" + estimator + "' needs --config");
  auto cfg = std::make_shared<EstimatorConfig>(
      estimator_config_from_json(*est_config));
  if (cfg->n != universe)
    throw std::runtime_error("estimator config universe differs from --universe");
  warn_small_k(*cfg);
  bundle.cfg = cfg;
  bundle.rand = std::make_shared<SketchRandomness>(cfg->seed, cfg->n);
  bundle.noise = std::make_shared<NoiseStream>(cfg->seed);
  if (estimator == "basic") {
    auto rand = bundle.rand;
    auto noise = bundle.noise;
    bundle.oracle = [cfg, rand, noise](std::span<const Key> keys) {
      return robust_estimate(*cfg, sketch_set(*rand, keys, cfg->k), *noise)
          .first.value;
    };
    return bundle;
  }
  if (estimator == "tracking") {
    bundle.ledger =
        std::make_shared<ChargeLedger>(static_cast<std::uint32_t>(cfg->r));
    auto rand = bundle.rand;
    auto noise = bundle.noise;
    auto ledger = bundle.ledger;
    bundle.oracle = [cfg, rand, noise, ledger](std::span<const Key> keys) {
      return std::get<0>(tracking_estimate(
                             *cfg, sketch_set(*rand, keys, cfg->k), *ledger,
                             *noise))
          .value;
    };
    return bundle;
  }
  throw std::runtime_error("unknown estimator: " + estimator);
}

int run_sketch(const std::string& input, std::uint64_t seed, std::uint64_t n,
               std::uint32_t k, const std::string& output) {
  const SketchRandomness rand(seed, n);
  std::vector<Key> keys;
  std::istringstream in(read_file(input));
  Key key;
  while (in >> key) keys.push_back(key);
  const BottomKSketch sketch = sketch_set(rand, keys, k);
  write_file(output, sketch_to_json(sketch).dump() + "\n");
  return 0;
}

int run_merge(const std::vector<std::string>& files, const std::string& output) {
  BottomKSketch acc = sketch_from_json(load_json(files[0]));
  for (std::size_t i = 1; i < files.size(); ++i)
    acc = merge(acc, sketch_from_json(load_json(files[i])));
  write_file(output, sketch_to_json(acc).dump() + "\n");
  return 0;
}

int run_estimate(const std::string& sketch_path, const std::string& config_path,
                 std::string estimator, const std::string& ledger_path,
                 std::uint64_t qid) {
  const BottomKSketch sketch = sketch_from_json(load_json(sketch_path));

  if (estimator == "std") {
    std::cout << estimate_response_to_json(std_estimate(sketch)).dump() << "\n";
    return 0;
  }

  if (config_path.empty())
    throw std::runtime_error("estimator '" + estimator + "' needs --config");
  const EstimatorConfig cfg = estimator_config_from_json(load_json(config_path));
  if (estimator.empty()) estimator = variant_name(cfg.variant);
  warn_small_k(cfg);
  NoiseStream noise(cfg.seed, qid);

  if (estimator == "basic") {
    const auto [est, trace] = robust_estimate(cfg, sketch, noise);
    std::cout << estimate_response_to_json(est).dump() << "\n";
    return 0;
  }
  if (estimator == "tracking") {
    ChargeLedger ledger =
        !ledger_path.empty() && std::filesystem::exists(ledger_path)
            ? ledger_from_json(load_json(ledger_path))
            : ChargeLedger(static_cast<std::uint32_t>(cfg.r));
    const auto [est, trace, diag] = tracking_estimate(cfg, sketch, ledger, noise);
    if (!ledger_path.empty())
      write_file(ledger_path, ledger_to_json(ledger).dump() + "\n");
    std::cout << estimate_response_to_json(est, diag.deactivated_in_sketch).dump()
              << "\n";
    return 0;
  }
  throw std::runtime_error("unknown estimator: " + estimator);
}

int run_attack(const AttackConfig& cfg, const std::string& estimator,
               const std::optional<Json>& est_config, const std::string& report_path,
               const std::string& transcript_path) {
  OracleBundle bundle =
      make_oracle(estimator, cfg.universe, cfg.k, cfg.seed, est_config);
  std::vector<TranscriptEntry> transcript;
  const AttackReport report =
      attack_standard_estimator(cfg, bundle.oracle, &transcript);
  write_file(report_path, attack_report_to_json(cfg, report).dump(2) + "\n");
  if (!transcript_path.empty()) {
    std::string lines;
    for (const auto& e : transcript)
      lines += transcript_entry_to_json(e).dump() + "\n";
    write_file(transcript_path, lines);
  }
  return 0;
}

int run_replay(const std::string& report_path, const std::string& transcript_path,
               const std::string& estimator, const std::optional<Json>& est_config,
               const std::string& output) {
  const Json report = load_json(report_path);
  const AttackConfig cfg = attack_config_from_json(report.at("config"));
  std::vector<TranscriptEntry> logged;
  std::istringstream lines(read_file(transcript_path));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    logged.push_back(transcript_entry_from_json(Json::parse(line)));
  }
  OracleBundle bundle =
      make_oracle(estimator, cfg.universe, cfg.k, cfg.seed, est_config);
  const std::vector<TranscriptEntry> replayed =
      replay_attack(cfg, logged, bundle.oracle);
  std::string out;
  for (const auto& e : replayed) out += transcript_entry_to_json(e).dump() + "\n";
  write_file(output, out);
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_path,
                       std::string sidecar_path) {
  const ExperimentConfig cfg = experiment_config_from_json(load_json(config_path));
  const std::vector<ExperimentRow> rows = run_experiment(cfg);
  write_file(out_path, experiment_csv(rows));
  if (sidecar_path.empty()) sidecar_path = out_path + ".config.json";
  write_file(sidecar_path, experiment_config_to_json(cfg).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composable bottom-k cardinality sketches with adaptively "
               "robust estimators"};
  app.require_subcommand(1);

  // sketch
  auto* sketch_cmd = app.add_subcommand(
      "sketch", "Build a sketch from newline-delimited key ids");
  std::string sk_input = "-", sk_output = "-";
  std::uint64_t sk_seed = 0, sk_n = 0;
  std::uint32_t sk_k = 0;
  sketch_cmd->add_option("--input", sk_input, "Key id file, '-' for stdin");
  sketch_cmd->add_option("--seed", sk_seed, "Master seed")->required();
  sketch_cmd->add_option("--n", sk_n, "Ground-set size")->required();
  sketch_cmd->add_option("--k", sk_k, "Sketch capacity")->required();
  sketch_cmd->add_option("--output", sk_output, "Sketch file, '-' for stdout");

  // merge
  auto* merge_cmd = app.add_subcommand("merge", "Merge sketch files");
  std::vector<std::string> mg_files;
  std::string mg_output = "-";
  merge_cmd->add_option("files", mg_files, "Sketch files")
      ->required()
      ->expected(2, -1);
  merge_cmd->add_option("--output", mg_output, "Merged sketch file");

  // estimate
  auto* est_cmd = app.add_subcommand(
      "estimate", "Apply a named estimator to a sketch file");
  std::string es_sketch, es_config, es_estimator, es_ledger;
  std::uint64_t es_qid = 0;
  est_cmd->add_option("--sketch", es_sketch, "Sketch file")->required();
  est_cmd->add_option("--config", es_config, "Estimator config JSON");
  est_cmd->add_option("--estimator", es_estimator,
                      "std | basic | tracking (default: config variant)");
  est_cmd->add_option("--ledger", es_ledger,
                      "Ledger snapshot for checkpoint/resume (tracking)");
  est_cmd->add_option("--qid", es_qid, "Query index; selects the noise lane");

  // attack
  auto* atk_cmd = app.add_subcommand(
      "attack", "Run the scoring attack against a named estimator");
  AttackConfig atk_cfg;
  std::string atk_estimator = "std", atk_config, atk_report = "-",
              atk_transcript, atk_replay_report, atk_replay_transcript,
              atk_output = "-";
  atk_cmd->add_option("--universe", atk_cfg.universe, "|U|");
  atk_cmd->add_option("--k", atk_cfg.k, "Sketch size under attack");
  atk_cmd->add_option("--rounds", atk_cfg.rounds, "Scoring rounds");
  atk_cmd->add_option("--removal-fraction", atk_cfg.removal_fraction,
                      "Fraction of top-scored keys to remove");
  atk_cmd->add_option("--seed", atk_cfg.seed, "Master seed");
  atk_cmd->add_option("--estimator", atk_estimator, "std | basic | tracking");
  atk_cmd->add_option("--config", atk_config,
                      "Estimator config JSON (basic/tracking)");
  atk_cmd->add_option("--report", atk_report, "Attack report JSON output");
  atk_cmd->add_option("--transcript", atk_transcript,
                      "Transcript JSONL output (one line per query)");
  atk_cmd->add_option("--replay-report", atk_replay_report,
                      "Replay: report JSON of the logged run");
  atk_cmd->add_option("--replay-transcript", atk_replay_transcript,
                      "Replay: transcript JSONL of the logged run");
  atk_cmd->add_option("--output", atk_output, "Replay output JSONL");

  // accounting
  auto* acc_cmd = app.add_subcommand(
      "accounting", "Print closed-form privacy bounds as JSON");
  std::uint64_t ac_r = 0;
  double ac_eps = 0, ac_alpha = 0, ac_delta = 0;
  acc_cmd->add_option("--r", ac_r, "Per-key budget")->required();
  acc_cmd->add_option("--eps", ac_eps, "Per-test epsilon")->required();
  acc_cmd->add_option("--alpha", ac_alpha, "Slack parameter")->required();
  acc_cmd->add_option("--delta", ac_delta, "Approximate-DP delta")->required();

  // experiment
  auto* exp_cmd = app.add_subcommand(
      "experiment", "Run the deactivation-gain sweep and write CSV");
  std::string ex_config, ex_out, ex_sidecar;
  exp_cmd->add_option("--config", ex_config, "Experiment config JSON")->required();
  exp_cmd->add_option("--out", ex_out, "CSV output path")->required();
  exp_cmd->add_option("--sidecar", ex_sidecar,
                      "Config sidecar path (default: <out>.config.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sketch_cmd->parsed())
      return run_sketch(sk_input, sk_seed, sk_n, sk_k, sk_output);
    if (merge_cmd->parsed()) return run_merge(mg_files, mg_output);
    if (est_cmd->parsed())
      return run_estimate(es_sketch, es_config, es_estimator, es_ledger, es_qid);
    if (atk_cmd->parsed()) {
      std::optional<Json> est_config;
      if (!atk_config.empty()) est_config = load_json(atk_config);
      if (!atk_replay_report.empty() || !atk_replay_transcript.empty()) {
        if (atk_replay_report.empty() || atk_replay_transcript.empty())
          throw std::runtime_error(
              "replay needs both --replay-report and --replay-transcript");
        return run_replay(atk_replay_report, atk_replay_transcript,
                          atk_estimator, est_config, atk_output);
      }
      return run_attack(atk_cfg, atk_estimator, est_config, atk_report,
                        atk_transcript);
    }
    if (acc_cmd->parsed()) {
      std::cout << privacy_bounds_to_json(
                       privacy_bounds(ac_r, ac_eps, ac_alpha, ac_delta))
                       .dump()
                << "\n";
      return 0;
    }
    if (exp_cmd->parsed()) return run_experiment_cmd(ex_config, ex_out, ex_sidecar);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
