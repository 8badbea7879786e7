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

#include <nlohmann/json.hpp>

#include "rfot/llm.hpp"
#include "rfot/params.hpp"
#include "rfot/prompts.hpp"
#include "rfot/rng.hpp"
#include "rfot/survey.hpp"

namespace rfot {

/// Comparison prompting strategies sharing the backend contract. They all
/// consume only the record's answered pairs; swapping backends never changes
/// the logic.
struct BaselineResult {
  MentalState label = MentalState::kNeutral;
  std::vector<double> consistencies;  // one fraction per format-checked reply
  nlohmann::json trace;
};

/// One prompt listing the answered pairs, asking directly for the ordinal.
BaselineResult io_predict(const SurveyRecord& record, Backend& llm, const PromptLibrary& prompts,
                          const StrategyParams& params);

/// One step-by-step prompt; the label is read from the last FINAL: line.
BaselineResult cot_predict(const SurveyRecord& record, Backend& llm, const PromptLibrary& prompts,
                           const StrategyParams& params);

/// n_chains independent step-by-step completions at generation temperature,
/// majority-voted with the shared tie rule. Chains that fail to parse
/// abstain.
BaselineResult sc_cot_predict(const SurveyRecord& record, Backend& llm,
                              const PromptLibrary& prompts, const StrategyParams& params,
                              std::size_t n_chains, SeededRng& rng);

/// Breadth-limited best-first tree search: per level, `breadth` candidate
/// steps are proposed and value-scored by the backend (1-10); the best is
/// carried forward `depth` times, then the label is extracted from the
/// chosen chain.
BaselineResult tot_predict(const SurveyRecord& record, Backend& llm, const PromptLibrary& prompts,
                           const StrategyParams& params, std::size_t breadth, std::size_t depth,
                           SeededRng& rng);

}  // namespace rfot
