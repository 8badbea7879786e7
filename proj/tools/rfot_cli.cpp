// Copyright 2026 the rfot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner. Exit codes: 0 success, 1 config error, 2 backend error,
// 3 data error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfot/errors.hpp"
#include "rfot/runner.hpp"
#include "rfot/util.hpp"

namespace {

rfot::DatasetFormat format_for(const std::string& flag, const std::string& dataset_path) {
  if (flag == "jsonl") return rfot::DatasetFormat::kJsonl;
  if (flag == "csv") return rfot::DatasetFormat::kCsv;
  if (!flag.empty()) throw rfot::ConfigError("unknown dataset format '" + flag + "'");
  return rfot::contains(rfot::to_lower(dataset_path), ".csv") ? rfot::DatasetFormat::kCsv
                                                              : rfot::DatasetFormat::kJsonl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-forest-of-thoughts survey experiment runner"};
  app.set_config("--config", "", "Config file (ini/toml); command-line flags win");

  std::string dataset, strategy = "rfot", backend_url, model, cassette, out_dir = "out";
  std::string format_flag, prompts_dir, mode = "majority_vote";
  std::uint64_t seed = 42;
  std::size_t samples = 100;
  int jobs = 1;
  bool record = false;
  double timeout_s = 60.0;
  rfot::StrategyParams params;

  app.add_option("--dataset", dataset, "Dataset file (jsonl or csv)")->required();
  app.add_option("--strategy", strategy,
                 "Strategy or comma list: io, cot, sc_cot, tot, rfot");
  app.add_option("--seed", seed, "Run seed");
  app.add_option("--samples", samples, "Records to evaluate (after stratified shuffle)");
  app.add_option("--backend-url", backend_url, "Chat-completions base URL (live/record mode)");
  app.add_option("--model", model, "Model name for the live backend");
  app.add_option("--cassette", cassette, "Cassette file (replay, or target of --record)");
  app.add_flag("--record", record, "Record live completions into the cassette");
  app.add_option("--jobs", jobs, "Records processed concurrently");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--format", format_flag, "Dataset format override: jsonl or csv");
  app.add_option("--prompts", prompts_dir, "Prompt template directory (default: built-in)");
  app.add_option("--mode", mode, "Ensemble aggregation: majority_vote or ordinal_mean");
  app.add_option("--timeout", timeout_s, "Live backend timeout in seconds");
  app.add_option("--forest-trees", params.forest_trees, "Ensemble size M");
  app.add_option("--forest-k", params.forest_k, "Thoughts sampled per tree");
  app.add_option("--max-keywords", params.max_keywords, "Keyword thoughts per aspect");
  app.add_option("--sc-chains", params.n_chains, "Self-consistency chain count");
  app.add_option("--tot-breadth", params.breadth, "Tree-of-thoughts candidates per level");
  app.add_option("--tot-depth", params.depth, "Tree-of-thoughts levels");
  app.add_option("--mc-samples", params.mc_samples,
                 "Monte Carlo permutations when the thought set exceeds the exact limit");

  CLI11_PARSE(app, argc, argv);

  try {
    rfot::RunConfig config;
    config.dataset_path = dataset;
    config.format = format_for(format_flag, dataset);
    config.strategies.clear();
    for (const auto& name : rfot::split(strategy, ',')) {
      if (!rfot::trim(name).empty()) {
        config.strategies.push_back(rfot::strategy_from_name(name));
      }
    }
    params.mode = rfot::aggregation_mode_from_name(mode);
    config.params = params;
    config.seed = seed;
    config.sample_limit = samples;
    config.jobs = jobs;
    config.out_dir = out_dir;
    config.prompts_dir = prompts_dir;

    if (record) {
      config.backend.mode = rfot::BackendMode::kRecord;
    } else if (!cassette.empty()) {
      config.backend.mode = rfot::BackendMode::kReplay;
    } else {
      config.backend.mode = rfot::BackendMode::kLive;
    }
    config.backend.url = backend_url;
    config.backend.model = model;
    config.backend.cassette_path = cassette;
    config.backend.timeout_s = timeout_s;
    if (const char* key = std::getenv("RFOT_API_KEY")) config.backend.api_key = key;

    const rfot::RunReport report = rfot::run(config);
    std::cout << rfot::render_results_table(report);
    std::cout << "wrote " << out_dir << "/results.csv, results.txt, traces.jsonl\n";
    return 0;
  } catch (const rfot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const rfot::CassetteMissError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 2;
  } catch (const rfot::TransportError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 2;
  } catch (const rfot::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 2;
  } catch (const rfot::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const rfot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
