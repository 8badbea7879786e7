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

#include "rfot/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "rfot/errors.hpp"
#include "rfot/util.hpp"

namespace rfot {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const std::vector<std::uint32_t> ca = decode_utf8(a);
  const std::vector<std::uint32_t> cb = decode_utf8(b);
  const std::size_t n = ca.size();
  const std::size_t m = cb.size();
  if (n == 0) return m;
  if (m == 0) return n;

  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> curr(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub_cost = (ca[i - 1] == cb[j - 1]) ? 0 : 1;
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + sub_cost});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

double consistency(std::string_view generated, std::string_view expected) {
  const std::size_t len_g = decode_utf8(generated).size();
  const std::size_t len_e = decode_utf8(expected).size();
  const std::size_t longest = std::max(len_g, len_e);
  if (longest == 0) return 1.0;  // both empty: perfect agreement
  const std::size_t dist = levenshtein(generated, expected);
  return 1.0 - static_cast<double>(dist) / static_cast<double>(longest);
}

namespace {

void check_paired(const std::vector<int>& preds, const std::vector<int>& truth) {
  if (preds.size() != truth.size()) {
    throw ShapeError("prediction and truth vectors differ in length: " +
                     std::to_string(preds.size()) + " vs " + std::to_string(truth.size()));
  }
  if (preds.empty()) throw ShapeError("prediction and truth vectors must be non-empty");
}

}  // namespace

double success_rate(const std::vector<int>& preds, const std::vector<int>& truth) {
  check_paired(preds, truth);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == truth[i]) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

double weighted_f1(const std::vector<int>& preds, const std::vector<int>& truth) {
  check_paired(preds, truth);
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(preds.begin(), preds.end());

  double weighted_sum = 0.0;
  for (int cls : classes) {
    std::size_t tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool pred_is = preds[i] == cls;
      const bool true_is = truth[i] == cls;
      if (true_is) ++support;
      if (pred_is && true_is) ++tp;
      if (pred_is && !true_is) ++fp;
      if (!pred_is && true_is) ++fn;
    }
    if (support == 0) continue;  // zero weight
    const double precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const double f1 =
        (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    weighted_sum += f1 * static_cast<double>(support);
  }
  return 100.0 * weighted_sum / static_cast<double>(truth.size());
}

double pass_rate(const std::vector<double>& scores, double threshold) {
  if (scores.empty()) throw EmptyInputError("pass_rate: no scores");
  std::size_t passing = 0;
  for (double s : scores) {
    if (s >= threshold) ++passing;
  }
  return 100.0 * static_cast<double>(passing) / static_cast<double>(scores.size());
}

std::string EvalResult::to_csv_row() const {
  return format_fixed(success_pct, 2) + "," + format_fixed(weighted_f1_pct, 2) + "," +
         format_fixed(mean_runtime_s, 2) + "," + format_fixed(consistency_pct, 2) + "," +
         std::to_string(n_samples);
}

EvalResult EvalResult::from_csv_row(std::string_view row) {
  auto fields = split(row, ',');
  if (fields.size() != 5) {
    throw ParseError("EvalResult row must have 5 fields, got " + std::to_string(fields.size()));
  }
  EvalResult out;
  try {
    out.success_pct = std::stod(fields[0]);
    out.weighted_f1_pct = std::stod(fields[1]);
    out.mean_runtime_s = std::stod(fields[2]);
    out.consistency_pct = std::stod(fields[3]);
    out.n_samples = static_cast<std::size_t>(std::stoull(fields[4]));
  } catch (const std::exception& e) {
    throw ParseError(std::string("EvalResult row has a non-numeric field: ") + e.what());
  }
  return out;
}

EvalResult evaluate(const std::vector<SampleOutcome>& samples) {
  if (samples.empty()) throw EmptyInputError("evaluate: no samples");
  std::vector<int> preds, truth;
  preds.reserve(samples.size());
  truth.reserve(samples.size());
  double runtime_sum = 0.0;
  double consistency_sum = 0.0;
  for (const auto& s : samples) {
    preds.push_back(s.pred);
    truth.push_back(s.truth);
    runtime_sum += s.runtime_s;
    consistency_sum += s.consistency;
  }
  EvalResult out;
  out.success_pct = success_rate(preds, truth);
  out.weighted_f1_pct = weighted_f1(preds, truth);
  out.mean_runtime_s = runtime_sum / static_cast<double>(samples.size());
  out.consistency_pct = 100.0 * consistency_sum / static_cast<double>(samples.size());
  out.n_samples = samples.size();
  return out;
}

}  // namespace rfot
