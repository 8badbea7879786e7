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

#include "rfot/synthetic.hpp"

#include <array>
#include <cctype>

#include "rfot/util.hpp"

namespace rfot {
namespace {

constexpr std::array<const char*, 3> kCategories = {"personal", "economics", "health"};

constexpr std::array<std::array<const char*, 2>, 3> kQuestions = {{
    {"How satisfied are you with your family life?",
     "Do you feel supported by friends and relatives?"},
    {"How stable is your household income?", "Are you worried about monthly expenses?"},
    {"How would you rate your physical health?", "How often do you feel energetic?"},
}};

constexpr std::array<const char*, 5> kAnswerTone = {
    "Things have been very hard lately",
    "It has not been going well",
    "It is acceptable, neither good nor bad",
    "It is going well overall",
    "It could hardly be better",
};

constexpr std::array<const char*, 4> kAdjectives = {"strained", "steady", "upbeat", "mixed"};
constexpr std::array<const char*, 6> kKeywordPool = {"anxious", "secure",  "content",
                                                     "hopeful", "drained", "balanced"};

std::string token_for(std::size_t respondent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "resp-r%02zu", respondent);
  return std::string(buf);
}

// Recovers NN from the first resp-rNN token in the text.
std::size_t respondent_from(const std::string& text, std::uint64_t fallback_hash) {
  const std::string needle = "resp-r";
  std::size_t pos = text.find(needle);
  if (pos == std::string::npos) return static_cast<std::size_t>(fallback_hash % 10);
  pos += needle.size();
  std::size_t value = 0;
  bool any = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    value = value * 10 + static_cast<std::size_t>(text[pos] - '0');
    any = true;
    ++pos;
  }
  return any ? value : static_cast<std::size_t>(fallback_hash % 10);
}

std::string prompt_field(const std::string& text, const std::string& field) {
  for (const auto& line : split(text, '\n')) {
    if (starts_with(line, field)) return trim(line.substr(field.size()));
  }
  return "";
}

int truth_of(std::size_t respondent) { return static_cast<int>(respondent % 5) + 1; }

int perturb(int base, std::uint64_t h, int keep_pct) {
  if (static_cast<int>((h >> 7) % 100) < keep_pct) return base;
  int shifted = base + (((h >> 13) % 2) ? 1 : -1);
  if (shifted < 1) shifted = 2;
  if (shifted > 5) shifted = 4;
  return shifted;
}

}  // namespace

Dataset make_synthetic_dataset(std::size_t n_records) {
  std::vector<SurveyRecord> records;
  records.reserve(n_records);
  for (std::size_t i = 0; i < n_records; ++i) {
    SurveyRecord rec;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "r%02zu", i);
    rec.record_id = idbuf;
    const int label = truth_of(i);
    rec.label = state_from_ordinal(label);
    const std::string token = token_for(i);

    int turn = 0;
    for (std::size_t c = 0; c < kCategories.size(); ++c) {
      for (std::size_t q = 0; q < kQuestions[c].size(); ++q, ++turn) {
        QAPair pair;
        pair.category = kCategories[c];
        pair.question = kQuestions[c][q];
        pair.turn_index = turn;
        const bool skip_turn = (i % 3 == 1) && turn == 3;       // income follow-up not asked
        const bool skip_category = (i == 4) && pair.category == "health";  // whole block skipped
        if (!skip_turn && !skip_category) {
          const std::size_t tone =
              static_cast<std::size_t>(label - 1 + static_cast<int>((i + q) % 2)) % 5;
          pair.answer = std::string(kAnswerTone[tone]) + " (" + token + ").";
        }
        rec.pairs.push_back(std::move(pair));
      }
    }
    records.push_back(std::move(rec));
  }
  return dataset_from_records("synthetic_survey", std::move(records));
}

int SurveyRuleBackend::opinion(std::size_t respondent) {
  const int truth = truth_of(respondent);
  if (respondent % 10 == 1 || respondent % 10 == 6) {
    return truth == 5 ? 4 : truth + 1;  // these respondents the model misreads
  }
  return truth;
}

Completion SurveyRuleBackend::complete(const PromptRequest& req) {
  const std::string& user = req.user;
  const std::uint64_t h = fnv1a64(user);
  const std::size_t respondent = respondent_from(user, h);
  const int op = opinion(respondent);
  const std::string token = token_for(respondent);
  const double latency = 0.010 + static_cast<double>(h % 100) / 10000.0;

  std::size_t repeat = 0;
  {
    std::lock_guard<std::mutex> lock(mu_);
    repeat = call_counts_[fingerprint(req)]++;
  }

  std::string text;
  if (contains(user, "ASPECT: <your analysis>")) {
    const std::string category = prompt_field(user, "Category:");
    text = "ASPECT: The " + category + " answers look " + kAdjectives[h % kAdjectives.size()] +
           " and point toward level " + std::to_string(op) + " (" + token + ")";
  } else if (contains(user, "KEYWORDS: <word1>")) {
    text = std::string("KEYWORDS: ") + kKeywordPool[h % kKeywordPool.size()] + " (" + token + ")";
  } else if (contains(user, "RESPONSE: <sentence>")) {
    const std::string category = prompt_field(user, "Category:");
    text = "RESPONSE: Judging by the " + category + " evidence the respondent seems " +
           std::string(state_name(state_from_ordinal(op))) + " (" + std::to_string(op) + ") (" +
           token + ")";
  } else if (contains(user, "Rate how promising")) {
    text = std::to_string(1 + static_cast<int>(h % 10));
  } else if (contains(user, "FINAL: <ordinal>")) {
    // Chains after the first drift a little, like resampled reasoning would.
    const int label =
        repeat == 0 ? op : perturb(op, h + repeat * 0x9e3779b97f4a7c15ULL, 60);
    text = "The answers form a consistent picture across categories (" + token + ").\nFINAL: " +
           std::to_string(label);
  } else if (contains(user, "Proposal ")) {
    text = "Weigh the " + std::string(kAdjectives[h % kAdjectives.size()]) +
           " signals against typical respondents (" + token + ").";
  } else if (contains(user, "Observations about a respondent")) {
    text = std::to_string(perturb(op, h, 70));
  } else if (contains(user, "Reasoning steps about a respondent")) {
    text = std::to_string(op);
  } else if (contains(user, "Survey interview:")) {
    const int label = perturb(op, h, 80);
    text = (h % 5 == 0) ? "Label: " + std::to_string(label) : std::to_string(label);
  } else {
    text = std::to_string(op);
  }
  return Completion{std::move(text), latency, id()};
}

std::vector<FixtureScenario> fixture_scenarios() {
  StrategyParams base;
  base.max_keywords = 1;  // keeps the candidate set small enough for exact scoring
  std::vector<FixtureScenario> scenarios;

  scenarios.push_back({"full_table",
                       {StrategyKind::kIo, StrategyKind::kCot, StrategyKind::kScCot,
                        StrategyKind::kTot, StrategyKind::kRfot},
                       base});

  FixtureScenario sc1{"sc_cot_1", {StrategyKind::kScCot}, base};
  sc1.params.n_chains = 1;
  scenarios.push_back(std::move(sc1));

  FixtureScenario tot11{"tot_1_1", {StrategyKind::kTot}, base};
  tot11.params.breadth = 1;
  tot11.params.depth = 1;
  scenarios.push_back(std::move(tot11));

  scenarios.push_back({"rfot_only", {StrategyKind::kRfot}, base});
  return scenarios;
}

RunConfig fixture_run_config(const FixtureScenario& scenario, const std::string& data_dir,
                             const std::string& out_dir) {
  RunConfig config;
  config.dataset_path = (std::filesystem::path(data_dir) / kFixtureDatasetFile).string();
  config.format = DatasetFormat::kJsonl;
  config.strategies = scenario.strategies;
  config.params = scenario.params;
  config.backend.mode = BackendMode::kReplay;
  config.backend.cassette_path = (std::filesystem::path(data_dir) / kFixtureCassetteFile).string();
  config.seed = kFixtureSeed;
  config.sample_limit = kFixtureSamples;
  config.jobs = 1;
  config.out_dir = out_dir;
  return config;
}

}  // namespace rfot
