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

#include "rfot/baselines.hpp"

#include <algorithm>

#include "rfot/errors.hpp"
#include "rfot/forest.hpp"
#include "rfot/util.hpp"

namespace rfot {
namespace {

using nlohmann::json;

PromptRequest make_request(const PromptLibrary& prompts, std::string user, double temperature,
                           int max_tokens) {
  PromptRequest req;
  req.system = prompts.system;
  req.user = std::move(user);
  req.temperature = temperature;
  req.max_tokens = max_tokens;
  return req;
}

/// Reads the ordinal from a chain's trailing FINAL: line.
std::optional<int> parse_final_line(std::string_view reply) {
  std::optional<int> result;
  for (const auto& raw : split(reply, '\n')) {
    const std::string line = trim(raw);
    if (starts_with(line, kFinalMarker)) {
      result = first_int_in_range(line.substr(kFinalMarker.size()), 1, 5);
    }
  }
  return result;
}

}  // namespace

BaselineResult io_predict(const SurveyRecord& record, Backend& llm, const PromptLibrary& prompts,
                          const StrategyParams& params) {
  const std::string user =
      render_template(prompts.io, {{"pairs", render_pairs(effective_pairs(record))}});
  const PromptRequest req =
      make_request(prompts, user, params.extract_temperature, params.max_tokens);
  const Completion completion = llm.complete(req);

  BaselineResult result;
  result.consistencies.push_back(reply_consistency(completion.text, kOrdinalReplySkeleton));
  result.trace = {{"prompt", req.user}, {"completion", completion.text}};
  const std::optional<int> parsed = first_int_in_range(completion.text, 1, 5);
  if (!parsed) {
    throw PredictionError("io_predict: no ordinal in reply '" + completion.text + "'");
  }
  result.label = state_from_ordinal(*parsed);
  return result;
}

BaselineResult cot_predict(const SurveyRecord& record, Backend& llm, const PromptLibrary& prompts,
                           const StrategyParams& params) {
  const std::string user =
      render_template(prompts.cot, {{"pairs", render_pairs(effective_pairs(record))}});
  const PromptRequest req = make_request(prompts, user, params.gen_temperature, params.max_tokens);
  const Completion completion = llm.complete(req);

  BaselineResult result;
  result.consistencies.push_back(reply_consistency(completion.text, kCotReplySkeleton));
  result.trace = {{"prompt", req.user}, {"completion", completion.text}};
  const std::optional<int> parsed = parse_final_line(completion.text);
  if (!parsed) {
    throw PredictionError("cot_predict: reply has no parseable FINAL line");
  }
  result.label = state_from_ordinal(*parsed);
  return result;
}

BaselineResult sc_cot_predict(const SurveyRecord& record, Backend& llm,
                              const PromptLibrary& prompts, const StrategyParams& params,
                              std::size_t n_chains, SeededRng& rng) {
  if (n_chains == 0) throw SizeError("sc_cot_predict: n_chains must be >= 1");
  const std::string user =
      render_template(prompts.cot, {{"pairs", render_pairs(effective_pairs(record))}});

  BaselineResult result;
  json chains = json::array();
  std::vector<std::pair<MentalState, double>> votes;
  for (std::size_t chain = 0; chain < n_chains; ++chain) {
    PromptRequest req = make_request(prompts, user, params.gen_temperature, params.max_tokens);
    req.seed_hint = static_cast<std::int64_t>(rng.derive(chain).seed());
    const Completion completion = llm.complete(req);
    result.consistencies.push_back(reply_consistency(completion.text, kCotReplySkeleton));
    const std::optional<int> parsed = parse_final_line(completion.text);
    chains.push_back({{"completion", completion.text},
                      {"label", parsed ? json(*parsed) : json(nullptr)}});
    if (parsed) votes.emplace_back(state_from_ordinal(*parsed), 0.0);
  }
  result.trace = {{"prompt", user}, {"chains", std::move(chains)}};
  if (votes.empty()) {
    throw PredictionError("sc_cot_predict: no chain produced a parseable FINAL line");
  }
  result.label = majority_vote(votes);
  return result;
}

BaselineResult tot_predict(const SurveyRecord& record, Backend& llm, const PromptLibrary& prompts,
                           const StrategyParams& params, std::size_t breadth, std::size_t depth,
                           SeededRng& rng) {
  if (breadth == 0 || depth == 0) throw SizeError("tot_predict: breadth and depth must be >= 1");
  const std::string pairs = render_pairs(effective_pairs(record));

  BaselineResult result;
  json levels = json::array();
  std::vector<std::string> steps;
  for (std::size_t level = 0; level < depth; ++level) {
    std::string steps_block = steps.empty() ? "(none yet)" : "";
    for (std::size_t i = 0; i < steps.size(); ++i) {
      steps_block += std::to_string(i + 1) + ". " + steps[i];
      if (i + 1 < steps.size()) steps_block += "\n";
    }

    std::vector<std::string> candidates;
    std::vector<int> scores;
    json level_trace = json::array();
    for (std::size_t b = 0; b < breadth; ++b) {
      PromptRequest propose = make_request(
          prompts,
          render_template(prompts.tot_propose, {{"pairs", pairs},
                                                {"steps", steps_block},
                                                {"index", std::to_string(b + 1)},
                                                {"breadth", std::to_string(breadth)}}),
          params.gen_temperature, params.max_tokens);
      propose.seed_hint = static_cast<std::int64_t>(rng.derive(level * breadth + b).seed());
      const Completion proposal = llm.complete(propose);
      result.consistencies.push_back(reply_consistency(proposal.text, kFreeformSkeleton));
      candidates.push_back(trim(proposal.text));
    }
    for (std::size_t b = 0; b < breadth; ++b) {
      const PromptRequest score_req = make_request(
          prompts,
          render_template(prompts.tot_score, {{"pairs", pairs},
                                              {"steps", steps_block},
                                              {"candidate", candidates[b]}}),
          params.extract_temperature, params.max_tokens);
      const Completion scored = llm.complete(score_req);
      result.consistencies.push_back(reply_consistency(scored.text, kOrdinalReplySkeleton));
      scores.push_back(first_int_in_range(scored.text, 1, 10).value_or(0));
      level_trace.push_back({{"candidate", candidates[b]}, {"score", scores.back()}});
    }
    const std::size_t best = static_cast<std::size_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
    steps.push_back(candidates[best]);
    levels.push_back({{"candidates", std::move(level_trace)}, {"chosen", best}});
  }

  std::string final_steps;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    final_steps += "Step " + std::to_string(i + 1) + ": " + steps[i];
    if (i + 1 < steps.size()) final_steps += "\n";
  }
  const PromptRequest extract =
      make_request(prompts, render_template(prompts.tree_predict, {{"steps", final_steps}}),
                   params.extract_temperature, params.max_tokens);
  const Completion completion = llm.complete(extract);
  result.consistencies.push_back(reply_consistency(completion.text, kOrdinalReplySkeleton));
  const std::optional<int> parsed = first_int_in_range(completion.text, 1, 5);
  result.trace = {{"levels", std::move(levels)},
                  {"extract_prompt", extract.user},
                  {"extract_completion", completion.text}};
  if (!parsed) {
    throw PredictionError("tot_predict: no ordinal in extraction reply");
  }
  result.label = state_from_ordinal(*parsed);
  return result;
}

}  // namespace rfot
