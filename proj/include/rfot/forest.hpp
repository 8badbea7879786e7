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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfot/icot.hpp"
#include "rfot/llm.hpp"
#include "rfot/params.hpp"
#include "rfot/prompts.hpp"
#include "rfot/rng.hpp"
#include "rfot/shapley.hpp"
#include "rfot/survey.hpp"

namespace rfot {

/// Normalized sampling weights over thought ids. Always sums to 1 and is
/// nonnegative.
struct SamplingDistribution {
  std::vector<std::string> ids;
  std::vector<double> probs;
};

/// Importance-proportional selection probabilities. Scores are clamped at a
/// small epsilon before normalizing so negatively-scored thoughts stay
/// selectable but rare; an all-nonpositive vector falls back to uniform.
SamplingDistribution selection_probabilities(const ImportanceVector& iv);

/// Same normalization restricted to the selected subset; used to draw roots.
SamplingDistribution root_probabilities(const ImportanceVector& iv,
                                        const std::vector<std::string>& selected);

/// Sequential draws without replacement, renormalizing the remaining mass
/// after each draw. Seeded-deterministic.
std::vector<std::string> weighted_sample_without_replacement(const SamplingDistribution& dist,
                                                             std::size_t count, SeededRng& rng);

/// n uniform draws with replacement from the record's n answered pairs.
std::vector<QAPair> bootstrap_pairs(const SurveyRecord& record, SeededRng& rng);

/// Information gain divided by split information, both base 2. A degenerate
/// split (zero split information) scores 0.
double gain_ratio(const std::vector<int>& feature, const std::vector<int>& labels);

/// Labeled rows a tree build can split against: which categories each
/// training respondent answered, and their true label.
struct TrainingContext {
  struct Row {
    std::set<std::string> categories;
    int label = 0;
  };
  std::vector<Row> rows;
};

TrainingContext make_training_context(const Dataset& ds);

struct TreeNode {
  std::string thought_id;
  int left = -1;   // index into ThoughtTree::nodes, -1 when absent
  int right = -1;

  bool operator==(const TreeNode&) const = default;
};

/// Binary tree over selected thoughts. Nodes are stored in construction
/// order, which is depth-first and left-before-right, so nodes[0] is the
/// root and the vector order equals the pre-order traversal.
struct ThoughtTree {
  std::vector<TreeNode> nodes;
  std::map<std::string, double> split_scores;  // thought id -> gain ratio

  std::vector<std::string> preorder_ids() const;
  nlohmann::json to_json() const;

  bool operator==(const ThoughtTree&) const = default;
};

struct RfotConfig {
  std::size_t trees = 5;        // ensemble size M
  std::size_t subset_size = 8;  // thoughts drawn per tree
  AggregationMode mode = AggregationMode::kMajorityVote;
};

struct ThoughtForest {
  std::vector<ThoughtTree> trees;
  std::uint64_t seed = 0;
  RfotConfig config;

  nlohmann::json to_json() const;
};

/// Builds one tree: the root is drawn from the importance distribution over
/// the selection, then the rest is partitioned recursively. The next node of
/// each partition is the remaining thought with the best gain ratio (feature:
/// "row answered this thought's category", over training rows matching the
/// bootstrap's categories); without a training context the highest-importance
/// thought is taken instead. Thoughts whose category co-occurs with the
/// node's category in the bootstrap sample go left, the rest right. The
/// first rng draw is the root draw.
ThoughtTree build_tree(const std::vector<std::string>& selected,
                       const CandidateThoughts& candidates, const ImportanceVector& iv,
                       const std::vector<QAPair>& bootstrap, const TrainingContext* context,
                       SeededRng& rng);

/// M trees, each from a fresh bootstrap and a fresh importance-weighted
/// subset draw, built with an independent generator derived from (seed, tree
/// index). Identical inputs give identical forests.
ThoughtForest build_forest(const SurveyRecord& record, const CandidateThoughts& candidates,
                           const ImportanceVector& iv, const RfotConfig& config, SeededRng& rng,
                           const TrainingContext* context = nullptr);

/// Pre-order linearization: numbered reasoning steps followed by the label
/// extraction instruction.
std::string linearize_tree(const ThoughtTree& tree, const CandidateThoughts& candidates,
                           const PromptLibrary& prompts);

struct TreeVote {
  int tree_index = 0;
  MentalState label = MentalState::kNeutral;

  bool operator==(const TreeVote&) const = default;
};

struct Prediction {
  MentalState label = MentalState::kNeutral;
  std::vector<TreeVote> per_tree;
  AggregationMode mode = AggregationMode::kMajorityVote;
};

struct PredictTraceEntry {
  int tree_index = 0;
  std::string prompt;
  std::string completion;
  std::optional<int> label;
  double consistency = 0.0;
  double latency_s = 0.0;
};

/// Shared majority-vote tie rule: most votes, then highest summed weight,
/// then lowest ordinal.
MentalState majority_vote(const std::vector<std::pair<MentalState, double>>& weighted_votes);

/// Mean ordinal rounded half away from zero, clamped to [1,5].
MentalState ordinal_mean_label(const std::vector<int>& ordinals);

/// Completes every tree's linearized prompt and aggregates the parsed labels
/// under the requested mode. Trees with unparseable output abstain; if all
/// abstain the prediction fails.
Prediction predict(const ThoughtForest& forest, const SurveyRecord& record,
                   const CandidateThoughts& candidates, const ImportanceVector& iv, Backend& llm,
                   const PromptLibrary& prompts, AggregationMode mode,
                   std::vector<PredictTraceEntry>* trace = nullptr,
                   double extract_temperature = 0.0, int max_tokens = 64);

}  // namespace rfot
