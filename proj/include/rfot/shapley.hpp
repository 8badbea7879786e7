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
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfot/rng.hpp"

namespace rfot {

/// Coalition value v(S): maps a subset of thought ids to a real score.
/// Evaluations are cached by canonical (sorted) subset, so the same subset is
/// evaluated exactly once per session — important when evaluation costs a
/// backend call. Safe for concurrent callers.
class ValueFunction {
 public:
  using Fn = std::function<double(const std::vector<std::string>&)>;

  explicit ValueFunction(Fn fn) : fn_(std::move(fn)) {}

  /// Value of the subset; argument order does not matter.
  double operator()(std::vector<std::string> ids) const;

  double empty_value() const { return (*this)({}); }

  /// Distinct subsets evaluated so far.
  std::size_t evaluations() const;

 private:
  Fn fn_;
  mutable std::mutex mu_;
  mutable std::map<std::string, double> cache_;
};

enum class AttributionMethod { kExact, kMonteCarlo };

/// Per-thought importance scores phi_j plus how they were obtained.
struct ImportanceVector {
  std::map<std::string, double> values;
  AttributionMethod method = AttributionMethod::kExact;
  std::size_t samples = 0;  // Monte Carlo only
  std::uint64_t seed = 0;   // Monte Carlo only

  double total() const;
  nlohmann::json to_json() const;
};

inline constexpr std::size_t kDefaultExactLimit = 12;

/// Exact Shapley values by full subset enumeration: each thought's score is
/// the average marginal contribution over every coalition that excludes it,
/// weighted by |S|!(n-|S|-1)!/n!. Limited to exact_limit players (2^n subset
/// evaluations); larger sets must use mc_shapley.
ImportanceVector exact_shapley(const ValueFunction& vf, const std::vector<std::string>& ids,
                               std::size_t exact_limit = kDefaultExactLimit);

/// Unbiased permutation-sampling estimate of the same quantity. Each sampled
/// permutation contributes one marginal per thought, so the estimate respects
/// efficiency exactly at any sample count. Bit-reproducible for a fixed seed.
ImportanceVector mc_shapley(const ValueFunction& vf, const std::vector<std::string>& ids,
                            std::size_t samples, SeededRng& rng);

/// The k ids with the highest scores; ties broken by higher score then
/// lexicographic id. k >= |ids| returns everything.
std::vector<std::string> top_k(const ImportanceVector& iv, std::size_t k);

}  // namespace rfot
