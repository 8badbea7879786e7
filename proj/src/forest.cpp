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

#include "rfot/forest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rfot/errors.hpp"
#include "rfot/util.hpp"

namespace rfot {
namespace {

using nlohmann::json;

constexpr double kClampEpsilon = 1e-6;

SamplingDistribution normalize_clamped(std::vector<std::string> ids, std::vector<double> phis) {
  SamplingDistribution dist;
  dist.ids = std::move(ids);
  const std::size_t n = dist.ids.size();
  bool any_positive = false;
  for (double phi : phis) {
    if (phi > 0.0) any_positive = true;
  }
  dist.probs.resize(n);
  if (!any_positive) {
    for (double& p : dist.probs) p = 1.0 / static_cast<double>(n);
    return dist;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dist.probs[i] = std::max(phis[i], kClampEpsilon);
    total += dist.probs[i];
  }
  for (double& p : dist.probs) p /= total;
  return dist;
}

double entropy_bits(const std::map<int, std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (const auto& [value, count] : counts) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

std::set<std::string> bootstrap_categories(const std::vector<QAPair>& bootstrap) {
  std::set<std::string> cats;
  for (const auto& p : bootstrap) cats.insert(p.category);
  return cats;
}

const Thought& thought_or_throw(const CandidateThoughts& candidates, const std::string& id) {
  const Thought* t = candidates.find(id);
  if (!t) throw Error("unknown thought id '" + id + "'");
  return *t;
}

double importance_of(const ImportanceVector& iv, const std::string& id) {
  auto it = iv.values.find(id);
  return it == iv.values.end() ? 0.0 : it->second;
}

}  // namespace

SamplingDistribution selection_probabilities(const ImportanceVector& iv) {
  if (iv.values.empty()) throw EmptyInputError("selection_probabilities: empty importance vector");
  std::vector<std::string> ids;
  std::vector<double> phis;
  for (const auto& [id, phi] : iv.values) {
    ids.push_back(id);
    phis.push_back(phi);
  }
  return normalize_clamped(std::move(ids), std::move(phis));
}

SamplingDistribution root_probabilities(const ImportanceVector& iv,
                                        const std::vector<std::string>& selected) {
  if (selected.empty()) throw EmptyInputError("root_probabilities: empty selection");
  std::vector<double> phis;
  phis.reserve(selected.size());
  for (const auto& id : selected) {
    auto it = iv.values.find(id);
    if (it == iv.values.end()) {
      throw Error("root_probabilities: id '" + id + "' is not in the importance vector");
    }
    phis.push_back(it->second);
  }
  return normalize_clamped(selected, std::move(phis));
}

std::vector<std::string> weighted_sample_without_replacement(const SamplingDistribution& dist,
                                                             std::size_t count, SeededRng& rng) {
  if (dist.ids.size() != dist.probs.size()) {
    throw ShapeError("sampling distribution ids/probs lengths differ");
  }
  if (count > dist.ids.size()) {
    throw SizeError("cannot draw " + std::to_string(count) + " ids from " +
                    std::to_string(dist.ids.size()) + " without replacement");
  }
  std::vector<double> mass = dist.probs;
  std::vector<bool> taken(mass.size(), false);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t draw = 0; draw < count; ++draw) {
    double total = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (!taken[i]) total += mass[i];
    }
    std::size_t picked = mass.size();
    if (total <= 0.0) {
      // Remaining mass exhausted (possible with explicit zero weights): fall
      // back to a uniform draw over what is left.
      std::size_t remaining = 0;
      for (std::size_t i = 0; i < mass.size(); ++i) {
        if (!taken[i]) ++remaining;
      }
      std::size_t target = static_cast<std::size_t>(rng.below(remaining));
      for (std::size_t i = 0; i < mass.size(); ++i) {
        if (taken[i]) continue;
        if (target == 0) {
          picked = i;
          break;
        }
        --target;
      }
    } else {
      const double r = rng.unit() * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < mass.size(); ++i) {
        if (taken[i]) continue;
        cumulative += mass[i];
        if (r < cumulative) {
          picked = i;
          break;
        }
      }
      if (picked == mass.size()) {
        // Floating-point overrun; take the last live index.
        for (std::size_t i = mass.size(); i-- > 0;) {
          if (!taken[i]) {
            picked = i;
            break;
          }
        }
      }
    }
    taken[picked] = true;
    out.push_back(dist.ids[picked]);
  }
  return out;
}

std::vector<QAPair> bootstrap_pairs(const SurveyRecord& record, SeededRng& rng) {
  const std::vector<QAPair> pool = effective_pairs(record);
  if (pool.empty()) {
    throw EmptyInputError("bootstrap_pairs: record '" + record.record_id +
                          "' has no answered pairs");
  }
  std::vector<QAPair> out;
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.push_back(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
  }
  return out;
}

double gain_ratio(const std::vector<int>& feature, const std::vector<int>& labels) {
  if (feature.size() != labels.size() || feature.empty()) {
    throw ShapeError("gain_ratio: feature and label vectors must match and be non-empty");
  }
  const std::size_t n = feature.size();

  std::map<int, std::size_t> label_counts;
  for (int label : labels) label_counts[label]++;
  const double h_labels = entropy_bits(label_counts, n);

  std::map<int, std::size_t> on_counts, off_counts;
  std::size_t on = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (feature[i]) {
      on_counts[labels[i]]++;
      ++on;
    } else {
      off_counts[labels[i]]++;
    }
  }
  const std::size_t off = n - on;
  if (on == 0 || off == 0) return 0.0;  // degenerate split

  const double w_on = static_cast<double>(on) / static_cast<double>(n);
  const double w_off = static_cast<double>(off) / static_cast<double>(n);
  const double conditional = w_on * entropy_bits(on_counts, on) + w_off * entropy_bits(off_counts, off);
  const double gain = h_labels - conditional;
  const double split_info = -w_on * std::log2(w_on) - w_off * std::log2(w_off);
  if (split_info == 0.0) return 0.0;
  return gain / split_info;
}

TrainingContext make_training_context(const Dataset& ds) {
  TrainingContext ctx;
  ctx.rows.reserve(ds.records.size());
  for (const auto& rec : ds.records) {
    TrainingContext::Row row;
    for (const auto& p : effective_pairs(rec)) row.categories.insert(p.category);
    row.label = ordinal(rec.label);
    ctx.rows.push_back(std::move(row));
  }
  return ctx;
}

std::vector<std::string> ThoughtTree::preorder_ids() const {
  std::vector<std::string> out;
  out.reserve(nodes.size());
  std::function<void(int)> walk = [&](int index) {
    if (index < 0) return;
    out.push_back(nodes[static_cast<std::size_t>(index)].thought_id);
    walk(nodes[static_cast<std::size_t>(index)].left);
    walk(nodes[static_cast<std::size_t>(index)].right);
  };
  if (!nodes.empty()) walk(0);
  return out;
}

json ThoughtTree::to_json() const {
  json j;
  json ns = json::array();
  for (const auto& node : nodes) {
    ns.push_back({{"thought_id", node.thought_id}, {"left", node.left}, {"right", node.right}});
  }
  j["nodes"] = std::move(ns);
  json scores = json::object();
  for (const auto& [id, score] : split_scores) scores[id] = score;
  j["split_scores"] = std::move(scores);
  return j;
}

json ThoughtForest::to_json() const {
  json j;
  j["seed"] = seed;
  j["config"] = {{"trees", config.trees},
                 {"subset_size", config.subset_size},
                 {"mode", std::string(aggregation_mode_name(config.mode))}};
  json ts = json::array();
  for (const auto& tree : trees) ts.push_back(tree.to_json());
  j["trees"] = std::move(ts);
  return j;
}

ThoughtTree build_tree(const std::vector<std::string>& selected,
                       const CandidateThoughts& candidates, const ImportanceVector& iv,
                       const std::vector<QAPair>& bootstrap, const TrainingContext* context,
                       SeededRng& rng) {
  if (selected.empty()) throw EmptyInputError("build_tree: empty selection");
  if (std::set<std::string>(selected.begin(), selected.end()).size() != selected.size()) {
    throw ValidationError("build_tree: selection contains duplicate thought ids");
  }

  // Root draw comes first so tests can reproduce it from an equal-seeded rng.
  const SamplingDistribution root_dist = root_probabilities(iv, selected);
  const std::string root_id = weighted_sample_without_replacement(root_dist, 1, rng)[0];

  const std::set<std::string> boot_cats = bootstrap_categories(bootstrap);

  // Training rows in scope: those overlapping the bootstrap's categories, or
  // everything when nothing overlaps.
  std::vector<const TrainingContext::Row*> scope;
  if (context) {
    for (const auto& row : context->rows) {
      for (const auto& cat : row.categories) {
        if (boot_cats.count(cat)) {
          scope.push_back(&row);
          break;
        }
      }
    }
    if (scope.empty()) {
      for (const auto& row : context->rows) scope.push_back(&row);
    }
  }

  ThoughtTree tree;

  auto split_score = [&](const std::string& id) -> double {
    const Thought& t = thought_or_throw(candidates, id);
    std::vector<int> feature, labels;
    feature.reserve(scope.size());
    labels.reserve(scope.size());
    for (const auto* row : scope) {
      feature.push_back(row->categories.count(t.category) ? 1 : 0);
      labels.push_back(row->label);
    }
    return gain_ratio(feature, labels);
  };

  auto choose_node = [&](const std::vector<std::string>& pool) -> std::string {
    if (pool.size() == 1) return pool.front();
    std::string best;
    double best_primary = 0.0;
    bool first = true;
    for (const auto& id : pool) {
      // Gain ratio drives the choice when training rows exist; otherwise
      // fall back to descending importance.
      const double primary = (context && !scope.empty()) ? split_score(id) : importance_of(iv, id);
      bool better = false;
      if (first) {
        better = true;
      } else if (primary != best_primary) {
        better = primary > best_primary;
      } else {
        const double phi_new = importance_of(iv, id);
        const double phi_best = importance_of(iv, best);
        if (phi_new != phi_best) {
          better = phi_new > phi_best;
        } else {
          better = id < best;
        }
      }
      if (better) {
        best = id;
        best_primary = primary;
        first = false;
      }
    }
    if (context && !scope.empty()) tree.split_scores[best] = best_primary;
    return best;
  };

  auto partition = [&](const std::vector<std::string>& pool, const std::string& node_id) {
    std::pair<std::vector<std::string>, std::vector<std::string>> out;
    const bool node_in_boot = boot_cats.count(thought_or_throw(candidates, node_id).category) > 0;
    for (const auto& id : pool) {
      const bool co_occurs =
          node_in_boot && boot_cats.count(thought_or_throw(candidates, id).category) > 0;
      (co_occurs ? out.first : out.second).push_back(id);
    }
    return out;
  };

  // Depth-first, left before right; nodes land in pre-order.
  std::function<int(std::string, std::vector<std::string>)> grow =
      [&](std::string node_id, std::vector<std::string> pool) -> int {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{std::move(node_id), -1, -1});
    auto [left_pool, right_pool] = partition(pool, tree.nodes[static_cast<std::size_t>(index)].thought_id);
    if (!left_pool.empty()) {
      std::string next = choose_node(left_pool);
      left_pool.erase(std::find(left_pool.begin(), left_pool.end(), next));
      const int child = grow(std::move(next), std::move(left_pool));
      tree.nodes[static_cast<std::size_t>(index)].left = child;
    }
    if (!right_pool.empty()) {
      std::string next = choose_node(right_pool);
      right_pool.erase(std::find(right_pool.begin(), right_pool.end(), next));
      const int child = grow(std::move(next), std::move(right_pool));
      tree.nodes[static_cast<std::size_t>(index)].right = child;
    }
    return index;
  };

  std::vector<std::string> rest;
  rest.reserve(selected.size() - 1);
  for (const auto& id : selected) {
    if (id != root_id) rest.push_back(id);
  }
  grow(root_id, std::move(rest));
  return tree;
}

ThoughtForest build_forest(const SurveyRecord& record, const CandidateThoughts& candidates,
                           const ImportanceVector& iv, const RfotConfig& config, SeededRng& rng,
                           const TrainingContext* context) {
  if (candidates.thoughts.empty()) throw EmptyInputError("build_forest: no candidate thoughts");
  if (config.trees == 0) throw SizeError("build_forest: ensemble size must be >= 1");

  ThoughtForest forest;
  forest.seed = rng.seed();
  forest.config = config;
  forest.trees.reserve(config.trees);

  const SamplingDistribution dist = selection_probabilities(iv);
  const std::size_t per_tree = std::min(config.subset_size, dist.ids.size());

  for (std::size_t m = 0; m < config.trees; ++m) {
    SeededRng tree_rng = rng.derive(m);
    const std::vector<QAPair> bootstrap = bootstrap_pairs(record, tree_rng);
    const std::vector<std::string> chosen =
        weighted_sample_without_replacement(dist, per_tree, tree_rng);
    forest.trees.push_back(build_tree(chosen, candidates, iv, bootstrap, context, tree_rng));
  }
  return forest;
}

std::string linearize_tree(const ThoughtTree& tree, const CandidateThoughts& candidates,
                           const PromptLibrary& prompts) {
  std::string steps;
  int step = 0;
  for (const auto& id : tree.preorder_ids()) {
    ++step;
    steps += "Step " + std::to_string(step) + ": " + thought_or_throw(candidates, id).text + "\n";
  }
  if (!steps.empty()) steps.pop_back();
  return render_template(prompts.tree_predict, {{"steps", steps}});
}

MentalState majority_vote(const std::vector<std::pair<MentalState, double>>& weighted_votes) {
  if (weighted_votes.empty()) throw EmptyInputError("majority_vote: no votes");
  std::map<int, std::size_t> counts;
  std::map<int, double> weights;
  for (const auto& [label, weight] : weighted_votes) {
    counts[ordinal(label)]++;
    weights[ordinal(label)] += weight;
  }
  int best = 0;
  for (const auto& [value, count] : counts) {
    if (best == 0) {
      best = value;
      continue;
    }
    const std::size_t best_count = counts[best];
    if (count != best_count) {
      if (count > best_count) best = value;
    } else if (weights[value] != weights[best]) {
      if (weights[value] > weights[best]) best = value;
    } else if (value < best) {
      best = value;  // final tie-break: lower ordinal
    }
  }
  return state_from_ordinal(best);
}

MentalState ordinal_mean_label(const std::vector<int>& ordinals) {
  if (ordinals.empty()) throw EmptyInputError("ordinal_mean_label: no ordinals");
  double sum = 0.0;
  for (int v : ordinals) sum += v;
  const double mean = sum / static_cast<double>(ordinals.size());
  long rounded = std::lround(mean);  // half away from zero
  rounded = std::clamp(rounded, 1L, 5L);
  return state_from_ordinal(static_cast<int>(rounded));
}

Prediction predict(const ThoughtForest& forest, const SurveyRecord& record,
                   const CandidateThoughts& candidates, const ImportanceVector& iv, Backend& llm,
                   const PromptLibrary& prompts, AggregationMode mode,
                   std::vector<PredictTraceEntry>* trace, double extract_temperature,
                   int max_tokens) {
  if (forest.trees.empty()) throw EmptyInputError("predict: forest has no trees");

  Prediction prediction;
  prediction.mode = mode;
  std::vector<std::pair<MentalState, double>> votes;

  for (std::size_t m = 0; m < forest.trees.size(); ++m) {
    const ThoughtTree& tree = forest.trees[m];
    PromptRequest req;
    req.system = prompts.system;
    req.user = linearize_tree(tree, candidates, prompts);
    req.temperature = extract_temperature;
    req.max_tokens = max_tokens;
    const Completion completion = llm.complete(req);

    PredictTraceEntry entry;
    entry.tree_index = static_cast<int>(m);
    entry.prompt = req.user;
    entry.completion = completion.text;
    entry.latency_s = completion.latency_s;
    entry.consistency = reply_consistency(completion.text, kOrdinalReplySkeleton);

    const std::optional<int> parsed = first_int_in_range(completion.text, 1, 5);
    if (parsed) {
      entry.label = parsed;
      const MentalState label = state_from_ordinal(*parsed);
      prediction.per_tree.push_back(TreeVote{static_cast<int>(m), label});
      double tree_weight = 0.0;
      for (const auto& id : tree.preorder_ids()) tree_weight += importance_of(iv, id);
      votes.emplace_back(label, tree_weight);
    }
    if (trace) trace->push_back(std::move(entry));
  }

  if (votes.empty()) {
    throw PredictionError("predict: every tree's output was unparseable for record '" +
                          record.record_id + "'");
  }
  if (mode == AggregationMode::kMajorityVote) {
    prediction.label = majority_vote(votes);
  } else {
    std::vector<int> ordinals;
    ordinals.reserve(prediction.per_tree.size());
    for (const auto& vote : prediction.per_tree) ordinals.push_back(ordinal(vote.label));
    prediction.label = ordinal_mean_label(ordinals);
  }
  return prediction;
}

}  // namespace rfot
