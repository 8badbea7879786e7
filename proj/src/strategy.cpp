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

#include "rfot/strategy.hpp"

#include <cmath>

#include "rfot/errors.hpp"
#include "rfot/util.hpp"

namespace rfot {
namespace {

using nlohmann::json;

json per_tree_json(const std::vector<PredictTraceEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) {
    out.push_back({{"tree", e.tree_index},
                   {"prompt", e.prompt},
                   {"completion", e.completion},
                   {"label", e.label ? json(*e.label) : json(nullptr)},
                   {"consistency", e.consistency}});
  }
  return out;
}

}  // namespace

std::uint64_t record_seed(std::uint64_t run_seed, const std::string& record_id) {
  return splitmix64(run_seed ^ fnv1a64(record_id));
}

ValueFunction make_label_value_function(const SurveyRecord& record,
                                        const CandidateThoughts& candidates, Backend& llm,
                                        const PromptLibrary& prompts,
                                        const StrategyParams& params) {
  const int truth = ordinal(record.label);
  // The callable receives canonically sorted ids from the ValueFunction
  // cache, so equal subsets always render the same probe.
  return ValueFunction([&candidates, &llm, prompts, params, truth](
                           const std::vector<std::string>& subset) -> double {
    std::string block;
    if (subset.empty()) {
      block = "(no observations)";
    } else {
      for (const auto& id : subset) {
        const Thought* t = candidates.find(id);
        if (!t) throw Error("value function got unknown thought id '" + id + "'");
        block += "- [" + t->category + " " + std::string(level_name(t->level)) + "] " + t->text;
        block += "\n";
      }
      block.pop_back();
    }
    PromptRequest req;
    req.system = prompts.system;
    req.user = render_template(prompts.value_probe, {{"thoughts", block}});
    req.temperature = params.extract_temperature;
    req.max_tokens = 64;
    const Completion completion = llm.complete(req);
    const std::optional<int> pred = first_int_in_range(completion.text, 1, 5);
    if (!pred) return 0.0;
    const double refinement = 0.1 * (5.0 - std::abs(*pred - truth)) / 5.0;
    return (*pred == truth ? 1.0 : 0.0) + refinement;
  });
}

StrategyOutcome rfot_predict(const SurveyRecord& record, Backend& llm,
                             const PromptLibrary& prompts, const StrategyParams& params,
                             std::uint64_t run_seed, const TrainingContext* context) {
  SeededRng rng(record_seed(run_seed, record.record_id));

  IcotConfig icot_config;
  icot_config.max_keywords = params.max_keywords;
  icot_config.parse_retries = params.parse_retries;
  icot_config.temperature = params.gen_temperature;
  icot_config.max_tokens = params.max_tokens;
  CandidateThoughts candidates = run_icot(record, llm, prompts, icot_config);

  StrategyOutcome outcome;
  for (const auto& entry : candidates.log) outcome.consistencies.push_back(entry.consistency);

  const std::vector<std::string> ids = candidates.ids();
  const ValueFunction vf = make_label_value_function(record, candidates, llm, prompts, params);
  ImportanceVector iv;
  if (ids.size() <= params.exact_limit) {
    iv = exact_shapley(vf, ids, params.exact_limit);
  } else {
    SeededRng mc_rng = rng.derive(1);
    iv = mc_shapley(vf, ids, params.mc_samples, mc_rng);
  }
  for (auto& thought : candidates.thoughts) {
    auto it = iv.values.find(thought.id);
    if (it != iv.values.end()) thought.importance = it->second;
  }

  RfotConfig forest_config;
  forest_config.trees = params.forest_trees;
  forest_config.subset_size = params.forest_k;
  forest_config.mode = params.mode;
  SeededRng forest_rng = rng.derive(2);
  const ThoughtForest forest =
      build_forest(record, candidates, iv, forest_config, forest_rng, context);

  std::vector<PredictTraceEntry> tree_trace;
  const Prediction prediction = predict(forest, record, candidates, iv, llm, prompts, params.mode,
                                        &tree_trace, params.extract_temperature, 64);
  for (const auto& entry : tree_trace) outcome.consistencies.push_back(entry.consistency);

  json votes = json::array();
  for (const auto& vote : prediction.per_tree) {
    votes.push_back({{"tree", vote.tree_index}, {"label", ordinal(vote.label)}});
  }
  outcome.label = prediction.label;
  outcome.trace = {{"candidates", candidates.to_json()},
                   {"importance", iv.to_json()},
                   {"value_evaluations", vf.evaluations()},
                   {"forest", forest.to_json()},
                   {"per_tree", per_tree_json(tree_trace)},
                   {"votes", std::move(votes)},
                   {"mode", std::string(aggregation_mode_name(params.mode))}};
  return outcome;
}

StrategyOutcome run_strategy(StrategyKind kind, const SurveyRecord& record, Backend& llm,
                             const PromptLibrary& prompts, const StrategyParams& params,
                             std::uint64_t run_seed, const TrainingContext* context) {
  TrackingBackend tracked(llm);
  StrategyOutcome outcome;
  try {
    switch (kind) {
      case StrategyKind::kIo: {
        BaselineResult r = io_predict(record, tracked, prompts, params);
        outcome.label = r.label;
        outcome.consistencies = std::move(r.consistencies);
        outcome.trace = std::move(r.trace);
        break;
      }
      case StrategyKind::kCot: {
        BaselineResult r = cot_predict(record, tracked, prompts, params);
        outcome.label = r.label;
        outcome.consistencies = std::move(r.consistencies);
        outcome.trace = std::move(r.trace);
        break;
      }
      case StrategyKind::kScCot: {
        SeededRng rng(record_seed(run_seed, record.record_id));
        BaselineResult r = sc_cot_predict(record, tracked, prompts, params, params.n_chains, rng);
        outcome.label = r.label;
        outcome.consistencies = std::move(r.consistencies);
        outcome.trace = std::move(r.trace);
        break;
      }
      case StrategyKind::kTot: {
        SeededRng rng(record_seed(run_seed, record.record_id));
        BaselineResult r =
            tot_predict(record, tracked, prompts, params, params.breadth, params.depth, rng);
        outcome.label = r.label;
        outcome.consistencies = std::move(r.consistencies);
        outcome.trace = std::move(r.trace);
        break;
      }
      case StrategyKind::kRfot: {
        StrategyOutcome r = rfot_predict(record, tracked, prompts, params, run_seed, context);
        outcome.label = r.label;
        outcome.consistencies = std::move(r.consistencies);
        outcome.trace = std::move(r.trace);
        break;
      }
    }
  } catch (const PredictionError& e) {
    outcome.label = std::nullopt;
    outcome.trace["error"] = e.what();
  } catch (const GenerationError& e) {
    outcome.label = std::nullopt;
    outcome.trace["error"] = e.what();
  }
  outcome.backend_calls = tracked.calls();
  outcome.backend_latency_s = tracked.total_latency_s();
  return outcome;
}

}  // namespace rfot
