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
#include <optional>

#include <nlohmann/json.hpp>

#include "rfot/baselines.hpp"
#include "rfot/forest.hpp"
#include "rfot/icot.hpp"
#include "rfot/llm.hpp"
#include "rfot/params.hpp"
#include "rfot/prompts.hpp"
#include "rfot/shapley.hpp"
#include "rfot/survey.hpp"

namespace rfot {

/// What one strategy produced for one record. A missing label means the
/// record failed (generation or prediction error); the error text lands in
/// the trace.
struct StrategyOutcome {
  std::optional<MentalState> label;
  std::vector<double> consistencies;
  std::size_t backend_calls = 0;
  double backend_latency_s = 0.0;  // summed reported latency = reported runtime
  nlohmann::json trace;
};

/// Per-record seed, stable under reordering of the evaluation set.
std::uint64_t record_seed(std::uint64_t run_seed, const std::string& record_id);

/// Coalition value for thought scoring: 1 when a label-extraction probe over
/// exactly the subset's thoughts hits the record's true label, plus a small
/// closeness refinement of 0.1 * (5 - |pred - true|) / 5. Unparseable probes
/// score 0. Cached per subset by the ValueFunction wrapper.
ValueFunction make_label_value_function(const SurveyRecord& record,
                                        const CandidateThoughts& candidates, Backend& llm,
                                        const PromptLibrary& prompts,
                                        const StrategyParams& params);

/// Full pipeline for one record: thought generation, Shapley scoring (exact
/// up to the configured limit, Monte Carlo beyond it), forest construction,
/// and ensemble prediction.
StrategyOutcome rfot_predict(const SurveyRecord& record, Backend& llm,
                             const PromptLibrary& prompts, const StrategyParams& params,
                             std::uint64_t run_seed, const TrainingContext* context = nullptr);

/// Dispatches any strategy and normalizes failures into an empty label.
/// Transport and cassette errors are not swallowed; they abort the run.
StrategyOutcome run_strategy(StrategyKind kind, const SurveyRecord& record, Backend& llm,
                             const PromptLibrary& prompts, const StrategyParams& params,
                             std::uint64_t run_seed, const TrainingContext* context = nullptr);

}  // namespace rfot
