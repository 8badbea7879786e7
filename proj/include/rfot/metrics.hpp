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
#include <vector>

namespace rfot {

/// Unit-cost edit distance (insert/delete/substitute) over Unicode scalar
/// values, not bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Format-adherence score in [0,1]: 1 - dist(generated, expected) /
/// max(|generated|, |expected|). Two empty strings agree perfectly.
double consistency(std::string_view generated, std::string_view expected);

/// Exact-match accuracy as a percentage.
double success_rate(const std::vector<int>& preds, const std::vector<int>& truth);

/// Per-class F1 weighted by true-class support, as a percentage. Classes that
/// appear in neither vector contribute nothing.
double weighted_f1(const std::vector<int>& preds, const std::vector<int>& truth);

/// Fraction of scores >= threshold, as a percentage.
double pass_rate(const std::vector<double>& scores, double threshold);

struct SampleOutcome {
  int pred = 0;  // 0 marks a failed prediction; never matches a truth ordinal
  int truth = 0;
  double runtime_s = 0.0;
  double consistency = 1.0;  // fraction in [0,1]
};

/// One evaluated row: the four reported columns plus the sample count.
struct EvalResult {
  double success_pct = 0.0;
  double weighted_f1_pct = 0.0;
  double mean_runtime_s = 0.0;
  double consistency_pct = 0.0;
  std::size_t n_samples = 0;

  std::string to_csv_row() const;
  static EvalResult from_csv_row(std::string_view row);

  bool operator==(const EvalResult&) const = default;
};

EvalResult evaluate(const std::vector<SampleOutcome>& samples);

}  // namespace rfot
