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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfot/llm.hpp"
#include "rfot/metrics.hpp"
#include "rfot/params.hpp"
#include "rfot/prompts.hpp"
#include "rfot/survey.hpp"

namespace rfot {

enum class BackendMode { kReplay, kLive, kRecord };

struct BackendSpec {
  BackendMode mode = BackendMode::kReplay;
  std::string url;     // live/record
  std::string model;   // live/record
  std::string api_key;
  std::string cassette_path;  // replay/record
  double timeout_s = 60.0;
};

struct RunConfig {
  std::string dataset_path;
  DatasetFormat format = DatasetFormat::kJsonl;
  std::vector<StrategyKind> strategies{StrategyKind::kRfot};
  StrategyParams params;
  BackendSpec backend;
  std::uint64_t seed = 42;
  std::size_t sample_limit = 100;
  int jobs = 1;
  std::string out_dir = "out";
  std::string prompts_dir;  // empty: builtin templates
  bool write_forests = true;
};

struct StrategyReportRow {
  StrategyKind strategy = StrategyKind::kRfot;
  EvalResult eval;
  double consistency_pass90_pct = 0.0;  // share of samples at score >= 0.9
  std::vector<int> preds;   // per evaluated record; 0 marks a failed record
  std::vector<int> truths;
  std::size_t backend_calls = 0;
};

struct RunReport {
  std::string dataset_name;
  std::string backend_id;
  std::vector<std::string> record_ids;  // evaluation order
  std::vector<StrategyReportRow> rows;
  std::vector<std::string> trace_lines;  // traces.jsonl content, one line each
  std::vector<std::pair<std::string, nlohmann::json>> forest_dumps;  // record_id -> forest
};

/// Deterministic evaluation order: records are grouped by label, each group
/// is shuffled with a seed-derived generator, and groups are interleaved
/// round-robin so every label surfaces early even at small sample limits.
std::vector<std::size_t> stratified_sample_order(const Dataset& ds, std::uint64_t seed);

/// Executes every configured strategy over the sampled records against the
/// given backend. Pure with respect to (config, dataset, backend state):
/// replaying the same cassette reproduces the report byte for byte.
RunReport run_with_backend(const RunConfig& config, const Dataset& ds, Backend& backend,
                           const PromptLibrary& prompts);

/// Loads everything per the config, runs, and writes results.csv,
/// results.txt, traces.jsonl and per-record forest dumps under out_dir.
/// In record mode the cassette is persisted (with a resume marker next to it
/// if the backend failed mid-run).
RunReport run(const RunConfig& config);

std::string render_results_csv(const RunReport& report);
std::string render_results_table(const RunReport& report);

}  // namespace rfot
