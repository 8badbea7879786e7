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
#include <mutex>
#include <string>
#include <vector>

#include "rfot/llm.hpp"
#include "rfot/runner.hpp"
#include "rfot/survey.hpp"

namespace rfot {

/// Deterministic demo dataset: n records over three categories with varying
/// skip patterns and labels cycling through all five levels. Every answer
/// embeds a resp-rNN token so rule-based fake models can stay consistent
/// across prompt shapes.
Dataset make_synthetic_dataset(std::size_t n_records = 10);

/// Deterministic fake survey model. It recognizes each prompt shape by its
/// template landmarks, recovers the respondent from the resp-rNN token, and
/// answers with well-formed replies whose label mostly tracks a fixed
/// per-respondent opinion. Repeat requests for the same prompt vary, which
/// gives self-consistency chains something to disagree about. Used to build
/// the shipped cassette; no network anywhere.
class SurveyRuleBackend : public Backend {
 public:
  Completion complete(const PromptRequest& req) override;
  std::string id() const override { return "scripted-survey-llm"; }

  /// The label the fake model believes for respondent NN.
  static int opinion(std::size_t respondent);

 private:
  std::mutex mu_;
  std::map<std::string, std::size_t> call_counts_;  // per fingerprint
};

/// One recorded/replayed experiment configuration. The shipped cassette is
/// the union of all scenarios, each recorded from fresh replay cursors, so
/// replaying any scenario in isolation works.
struct FixtureScenario {
  std::string name;
  std::vector<StrategyKind> strategies;
  StrategyParams params;
};

std::vector<FixtureScenario> fixture_scenarios();

inline constexpr std::uint64_t kFixtureSeed = 20250807;
inline constexpr std::size_t kFixtureSamples = 10;
inline constexpr const char* kFixtureDatasetFile = "synthetic_survey.jsonl";
inline constexpr const char* kFixtureCassetteFile = "synthetic_cassette.json";

/// Replay-mode RunConfig for a scenario over the shipped fixture files.
RunConfig fixture_run_config(const FixtureScenario& scenario, const std::string& data_dir,
                             const std::string& out_dir);

}  // namespace rfot
