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

#include <cstddef>
#include <string>
#include <string_view>

namespace rfot {

enum class StrategyKind { kIo, kCot, kScCot, kTot, kRfot };

std::string_view strategy_name(StrategyKind kind);          // machine name, e.g. "sc_cot"
std::string_view strategy_display_name(StrategyKind kind);  // table name, e.g. "SC-CoT"
StrategyKind strategy_from_name(std::string_view name);     // throws ConfigError

/// How per-tree labels are combined into the ensemble label.
enum class AggregationMode { kMajorityVote, kOrdinalMean };

std::string_view aggregation_mode_name(AggregationMode mode);
AggregationMode aggregation_mode_from_name(std::string_view name);  // throws ConfigError

/// Every strategy knob in one place. Defaults are the shipped configuration.
struct StrategyParams {
  // forest
  std::size_t forest_trees = 5;   // ensemble size M
  std::size_t forest_k = 8;       // thoughts sampled per tree
  AggregationMode mode = AggregationMode::kMajorityVote;

  // thought generation
  int max_keywords = 3;
  int parse_retries = 2;
  double gen_temperature = 0.7;      // thought generation
  double extract_temperature = 0.0;  // final label extraction
  int max_tokens = 256;

  // attribution
  std::size_t exact_limit = 12;
  std::size_t mc_samples = 2000;

  // baselines
  std::size_t n_chains = 5;  // sc_cot
  std::size_t breadth = 3;   // tot
  std::size_t depth = 2;     // tot
};

}  // namespace rfot
