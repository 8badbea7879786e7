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

#include "rfot/shapley.hpp"

#include <algorithm>
#include <bit>

#include "rfot/errors.hpp"

namespace rfot {

using nlohmann::json;

double ValueFunction::operator()(std::vector<std::string> ids) const {
  std::sort(ids.begin(), ids.end());
  std::string key;
  for (const auto& id : ids) {
    key += id;
    key += '\x1f';
  }
  // Single critical section: each subset is computed exactly once even under
  // concurrent callers, which keeps backend-call counts deterministic.
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double value = fn_(ids);
  cache_.emplace(std::move(key), value);
  return value;
}

std::size_t ValueFunction::evaluations() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

double ImportanceVector::total() const {
  double sum = 0.0;
  for (const auto& [id, phi] : values) sum += phi;
  return sum;
}

json ImportanceVector::to_json() const {
  json j;
  json vals = json::object();
  for (const auto& [id, phi] : values) vals[id] = phi;
  j["values"] = std::move(vals);
  j["method"] = method == AttributionMethod::kExact ? "exact" : "monte_carlo";
  if (method == AttributionMethod::kMonteCarlo) {
    j["samples"] = samples;
    j["seed"] = seed;
  }
  return j;
}

ImportanceVector exact_shapley(const ValueFunction& vf, const std::vector<std::string>& ids,
                               std::size_t exact_limit) {
  if (ids.empty()) throw EmptyInputError("exact_shapley: no thought ids");
  const std::size_t n = ids.size();
  if (n > exact_limit) {
    throw SizeError("exact_shapley: " + std::to_string(n) + " thoughts exceed the exact limit of " +
                    std::to_string(exact_limit) + "; use mc_shapley");
  }

  // Value of every coalition, indexed by membership bitmask.
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> value(masks);
  std::vector<std::string> subset;
  subset.reserve(n);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    subset.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) subset.push_back(ids[i]);
    }
    value[mask] = vf(subset);
  }

  // weight(|S|) = |S|! (n-|S|-1)! / n!
  std::vector<double> weight(n);
  for (std::size_t s = 0; s < n; ++s) {
    double w = 1.0;
    for (std::size_t i = 2; i <= s; ++i) w *= static_cast<double>(i);
    for (std::size_t i = 2; i <= n - s - 1; ++i) w *= static_cast<double>(i);
    for (std::size_t i = 2; i <= n; ++i) w /= static_cast<double>(i);
    weight[s] = w;
  }

  ImportanceVector iv;
  iv.method = AttributionMethod::kExact;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < masks; ++mask) {
      if (mask & bit) continue;
      const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
      phi += weight[size] * (value[mask | bit] - value[mask]);
    }
    iv.values[ids[j]] = phi;
  }
  return iv;
}

ImportanceVector mc_shapley(const ValueFunction& vf, const std::vector<std::string>& ids,
                            std::size_t samples, SeededRng& rng) {
  if (ids.empty()) throw EmptyInputError("mc_shapley: no thought ids");
  if (samples == 0) throw SizeError("mc_shapley: samples must be >= 1");

  ImportanceVector iv;
  iv.method = AttributionMethod::kMonteCarlo;
  iv.samples = samples;
  iv.seed = rng.seed();

  std::map<std::string, double> sums;
  for (const auto& id : ids) sums[id] = 0.0;

  std::vector<std::string> order = ids;
  std::vector<std::string> prefix;
  prefix.reserve(ids.size());
  for (std::size_t s = 0; s < samples; ++s) {
    rng.shuffle(order);
    prefix.clear();
    double previous = vf(prefix);
    for (const auto& id : order) {
      prefix.push_back(id);
      const double current = vf(prefix);
      sums[id] += current - previous;
      previous = current;
    }
  }
  for (auto& [id, sum] : sums) {
    iv.values[id] = sum / static_cast<double>(samples);
  }
  return iv;
}

std::vector<std::string> top_k(const ImportanceVector& iv, std::size_t k) {
  if (iv.values.empty()) throw EmptyInputError("top_k: empty importance vector");
  if (k == 0) throw SizeError("top_k: k must be >= 1");

  std::vector<std::pair<std::string, double>> ranked(iv.values.begin(), iv.values.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& l, const auto& r) {
    if (l.second != r.second) return l.second > r.second;
    return l.first < r.first;
  });
  const std::size_t take = std::min(k, ranked.size());
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(ranked[i].first);
  return out;
}

}  // namespace rfot
