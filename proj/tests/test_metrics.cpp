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

#include <doctest.h>

#include <algorithm>

#include "rfot/errors.hpp"
#include "rfot/metrics.hpp"
#include "rfot/rng.hpp"

using namespace rfot;

namespace {

std::string random_string(SeededRng& rng, std::size_t max_len) {
  static const char* kAlphabet = "abcdefg ,.";
  std::string out;
  const std::size_t len = rng.below(max_len + 1);
  for (std::size_t i = 0; i < len; ++i) out.push_back(kAlphabet[rng.below(10)]);
  return out;
}

}  // namespace

TEST_CASE("levenshtein ground truths") {
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "") == 3);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("same", "same") == 0);
  CHECK(levenshtein("", "") == 0);
}

TEST_CASE("levenshtein counts Unicode scalar values, not bytes") {
  CHECK(levenshtein("héllo", "hello") == 1);   // é is two bytes, one scalar
  CHECK(levenshtein("日本語", "日本") == 1);
  CHECK(levenshtein("日本語", "") == 3);
}

TEST_CASE("levenshtein satisfies the triangle inequality") {
  SeededRng rng(31);
  for (int round = 0; round < 200; ++round) {
    const std::string a = random_string(rng, 20);
    const std::string b = random_string(rng, 20);
    const std::string c = random_string(rng, 20);
    CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
    CHECK(levenshtein(a, b) == levenshtein(b, a));
  }
}

TEST_CASE("consistency formula") {
  CHECK(consistency("same", "same") == doctest::Approx(1.0));
  CHECK(consistency("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
  CHECK(consistency("abc", "xyz") == doctest::Approx(0.0));  // no shared characters
  CHECK(consistency("", "") == doctest::Approx(1.0));
  CHECK(consistency("", "abc") == doctest::Approx(0.0));
}

TEST_CASE("consistency stays in range, is symmetric, and is 1 iff equal") {
  SeededRng rng(32);
  for (int round = 0; round < 300; ++round) {
    const std::string a = random_string(rng, 16);
    const std::string b = random_string(rng, 16);
    if (a.empty() && b.empty()) continue;
    const double c = consistency(a, b);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(c == doctest::Approx(consistency(b, a)));
    if (a == b) {
      CHECK(c == doctest::Approx(1.0));
    } else {
      CHECK(c < 1.0);
    }
  }
}

TEST_CASE("success_rate oracle cases") {
  CHECK(success_rate({4, 2, 3}, {4, 2, 3}) == doctest::Approx(100.0));
  CHECK(success_rate({1, 1, 1}, {2, 3, 4}) == doctest::Approx(0.0));
  std::vector<int> preds(102, 1), truth(102, 1);
  for (std::size_t i = 51; i < 102; ++i) truth[i] = 2;
  CHECK(success_rate(preds, truth) == doctest::Approx(50.0));
  CHECK_THROWS_AS(success_rate({1}, {1, 2}), ShapeError);
  CHECK_THROWS_AS(success_rate({}, {}), ShapeError);
}

TEST_CASE("weighted_f1 matches the hand-computed confusion fixture") {
  // truth [4,4,2,2], preds [4,2,2,2]: F1(4)=2/3 (p=1, r=1/2), F1(2)=4/5
  // (p=2/3, r=1), each class carries half the weight -> 11/15 = 73.33%.
  const double got = weighted_f1({4, 2, 2, 2}, {4, 4, 2, 2});
  CHECK(got == doctest::Approx(100.0 * 11.0 / 15.0).epsilon(1e-9));
  CHECK(got == doctest::Approx(73.33).epsilon(1e-3));
}

TEST_CASE("weighted_f1 edge behavior") {
  CHECK(weighted_f1({1, 2, 3}, {1, 2, 3}) == doctest::Approx(100.0));
  // Sample order does not matter.
  std::vector<int> preds = {4, 2, 2, 2, 5, 1};
  std::vector<int> truth = {4, 4, 2, 2, 5, 2};
  const double base = weighted_f1(preds, truth);
  SeededRng rng(9);
  std::vector<std::size_t> order = {0, 1, 2, 3, 4, 5};
  for (int round = 0; round < 10; ++round) {
    rng.shuffle(order);
    std::vector<int> p2, t2;
    for (std::size_t i : order) {
      p2.push_back(preds[i]);
      t2.push_back(truth[i]);
    }
    CHECK(weighted_f1(p2, t2) == doctest::Approx(base));
  }
  // A predicted-only class (failed prediction marker 0) carries zero weight.
  CHECK(weighted_f1({0, 2}, {2, 2}) == doctest::Approx(100.0 * (2.0 / 3.0)));
  CHECK_THROWS_AS(weighted_f1({1}, {1, 2}), ShapeError);
}

TEST_CASE("success equals weighted F1 on perfect predictions") {
  SeededRng rng(13);
  for (int round = 0; round < 20; ++round) {
    std::vector<int> truth;
    for (int i = 0; i < 30; ++i) truth.push_back(1 + static_cast<int>(rng.below(5)));
    CHECK(success_rate(truth, truth) == doctest::Approx(weighted_f1(truth, truth)));
  }
}

TEST_CASE("evaluate aggregates the four reported columns") {
  EvalResult single = evaluate({SampleOutcome{4, 4, 3.39, 1.0}});
  CHECK(single.success_pct == doctest::Approx(100.0));
  CHECK(single.weighted_f1_pct == doctest::Approx(100.0));
  CHECK(single.mean_runtime_s == doctest::Approx(3.39));
  CHECK(single.consistency_pct == doctest::Approx(100.0));
  CHECK(single.n_samples == 1);

  EvalResult two = evaluate({SampleOutcome{4, 4, 1.0, 1.0}, SampleOutcome{2, 4, 3.0, 0.5}});
  CHECK(two.mean_runtime_s == doctest::Approx(2.0));  // arithmetic mean
  CHECK(two.consistency_pct == doctest::Approx(75.0));
  CHECK_THROWS_AS(evaluate({}), EmptyInputError);
}

TEST_CASE("a Table-1-shaped row round-trips through the CSV format") {
  EvalResult row;
  row.success_pct = 22.22;
  row.weighted_f1_pct = 22.09;
  row.mean_runtime_s = 3.39;
  row.consistency_pct = 100.0;
  row.n_samples = 100;
  const std::string csv = row.to_csv_row();
  CHECK(csv == "22.22,22.09,3.39,100.00,100");
  CHECK(EvalResult::from_csv_row(csv) == row);
  CHECK_THROWS_AS(EvalResult::from_csv_row("1,2,3"), ParseError);
}

TEST_CASE("pass_rate counts scores at or above the threshold") {
  CHECK(pass_rate({1.0, 0.95, 0.5, 0.89}, 0.9) == doctest::Approx(50.0));
  CHECK(pass_rate({1.0}, 0.9) == doctest::Approx(100.0));
  CHECK_THROWS_AS(pass_rate({}, 0.9), EmptyInputError);
}
