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

#include <map>
#include <set>

#include "rfot/errors.hpp"
#include "rfot/icot.hpp"
#include "rfot/llm.hpp"
#include "rfot/prompts.hpp"
#include "rfot/survey.hpp"

using namespace rfot;

namespace {

const PromptLibrary& prompts() {
  static const PromptLibrary lib = PromptLibrary::builtin();
  return lib;
}

SurveyRecord three_category_record() {
  SurveyRecord rec;
  rec.record_id = "rec";
  rec.label = MentalState::kHappy;
  rec.pairs = {
      QAPair{"economics", "income?", "stable and sufficient", 0},
      QAPair{"health", "sleep?", "seven hours", 1},
      QAPair{"personal", "family?", "close and supportive", 2},
  };
  return rec;
}

// Rule-driven fake model that always answers in the expected formats.
FunctionBackend well_formed_backend() {
  return FunctionBackend([](const PromptRequest& req) -> std::string {
    if (req.user.find("ASPECT: <your analysis>") != std::string::npos) {
      return "ASPECT: stable income, satisfied";
    }
    if (req.user.find("KEYWORDS: <word1>") != std::string::npos) {
      return "KEYWORDS: satisfied, secure";
    }
    return "RESPONSE: economic security suggests happy (4)";
  });
}

}  // namespace

TEST_CASE("parse_thought extracts the content after the level marker") {
  ParsedReply parsed = parse_thought("ASPECT: fine", ThoughtLevel::kAspect);
  CHECK(parsed.content == "fine");
  CHECK(parsed.consistency == doctest::Approx(1.0));  // exactly templated reply
}

TEST_CASE("parse_thought rejects the wrong marker") {
  CHECK_THROWS_AS(parse_thought("RESPONSE: nope", ThoughtLevel::kKeyword), ParseError);
  CHECK_THROWS_AS(parse_thought("no marker here", ThoughtLevel::kAspect), ParseError);
  ParseOutcome outcome = try_parse_thought("no marker here", ThoughtLevel::kAspect);
  CHECK_FALSE(outcome.content.has_value());
  CHECK(outcome.consistency < 1.0);  // failures still get a score for the audit log
}

TEST_CASE("generate_aspect wraps a scripted reply into an aspect thought") {
  FunctionBackend backend([](const PromptRequest&) {
    return std::string("ASPECT: stable income, satisfied");
  });
  IcotConfig config;
  std::vector<GenerationLogEntry> log;
  Thought aspect = generate_aspect({QAPair{"economics", "income?", "stable", 0}}, "economics",
                                   backend, prompts(), config, "rec", &log);
  CHECK(aspect.level == ThoughtLevel::kAspect);
  CHECK(aspect.category == "economics");
  CHECK(aspect.text == "stable income, satisfied");
  CHECK_FALSE(aspect.parent_id.has_value());
  REQUIRE(log.size() == 1);
  CHECK(log[0].status == ParseStatus::kOk);
}

TEST_CASE("generate_aspect requires at least one answered pair") {
  FunctionBackend backend([](const PromptRequest&) { return std::string("ASPECT: x"); });
  IcotConfig config;
  CHECK_THROWS_AS(generate_aspect({QAPair{"economics", "income?", std::nullopt, 0}}, "economics",
                                  backend, prompts(), config, "rec", nullptr),
                  EmptyInputError);
}

TEST_CASE("extract_keywords splits, deduplicates and parents the keywords") {
  Thought aspect{"rec/economics/a0", ThoughtLevel::kAspect, "economics",
                 "satisfied with income", std::nullopt, std::nullopt};
  IcotConfig config;

  FunctionBackend two([](const PromptRequest&) { return std::string("KEYWORDS: satisfied, secure"); });
  auto keywords = extract_keywords(aspect, two, prompts(), config, nullptr);
  REQUIRE(keywords.size() == 2);
  CHECK(keywords[0].text == "satisfied");
  CHECK(keywords[1].text == "secure");
  for (const auto& k : keywords) {
    CHECK(k.level == ThoughtLevel::kKeyword);
    CHECK(k.parent_id == aspect.id);
  }

  FunctionBackend dup([](const PromptRequest&) { return std::string("KEYWORDS: happy, Happy"); });
  CHECK(extract_keywords(aspect, dup, prompts(), config, nullptr).size() == 1);

  // max_keywords caps the kept list.
  FunctionBackend many([](const PromptRequest&) { return std::string("KEYWORDS: a, b, c, d, e"); });
  IcotConfig capped;
  capped.max_keywords = 3;
  CHECK(extract_keywords(aspect, many, prompts(), capped, nullptr).size() == 3);
}

TEST_CASE("generate_response grows a response from one keyword") {
  Thought keyword{"rec/economics/k0", ThoughtLevel::kKeyword, "economics", "secure",
                  std::string("rec/economics/a0"), std::nullopt};
  FunctionBackend backend(
      [](const PromptRequest&) { return std::string("RESPONSE: economic security suggests happy (4)"); });
  IcotConfig config;
  Thought response = generate_response(keyword, "aspect text", backend, prompts(), config, nullptr);
  CHECK(response.level == ThoughtLevel::kResponse);
  CHECK(response.parent_id == keyword.id);
  CHECK(response.text == "economic security suggests happy (4)");
}

TEST_CASE("persistent parse failures are logged and exhaust the retry budget") {
  std::atomic<int> calls{0};
  FunctionBackend backend([&calls](const PromptRequest&) {
    calls.fetch_add(1);
    return std::string("no marker here");
  });
  IcotConfig config;  // parse_retries = 2 -> three attempts total
  std::vector<GenerationLogEntry> log;
  CHECK_THROWS_AS(generate_aspect({QAPair{"c", "q", "a", 0}}, "c", backend, prompts(), config,
                                  "rec", &log),
                  GenerationError);
  CHECK(calls.load() == 3);
  REQUIRE(log.size() == 3);
  for (const auto& entry : log) CHECK(entry.status == ParseStatus::kParseError);
  CHECK(log[2].attempt == 2);
}

TEST_CASE("retry re-asks carry a format reminder, changing the fingerprint") {
  std::vector<std::string> users;
  FunctionBackend backend([&users](const PromptRequest& req) {
    users.push_back(req.user);
    return users.size() < 2 ? std::string("garbled") : std::string("ASPECT: recovered");
  });
  IcotConfig config;
  Thought aspect = generate_aspect({QAPair{"c", "q", "a", 0}}, "c", backend, prompts(), config,
                                   "rec", nullptr);
  CHECK(aspect.text == "recovered");
  REQUIRE(users.size() == 2);
  CHECK(users[0].find("Reminder") == std::string::npos);
  CHECK(users[1].find("Reminder") != std::string::npos);
}

TEST_CASE("run_icot covers every answered category") {
  FunctionBackend backend = well_formed_backend();
  IcotConfig config;
  CandidateThoughts cands = run_icot(three_category_record(), backend, prompts(), config);

  std::map<ThoughtLevel, int> by_level;
  for (const auto& t : cands.thoughts) by_level[t.level]++;
  CHECK(by_level[ThoughtLevel::kAspect] == 3);
  CHECK(by_level[ThoughtLevel::kKeyword] >= 3);
  CHECK(by_level[ThoughtLevel::kResponse] == 3);

  // Output is sorted by category name regardless of turn order.
  std::vector<std::string> categories;
  for (const auto& t : cands.thoughts) {
    if (categories.empty() || categories.back() != t.category) categories.push_back(t.category);
  }
  CHECK(categories == std::vector<std::string>{"economics", "health", "personal"});
}

TEST_CASE("run_icot confines candidates to the record's single category") {
  SurveyRecord rec;
  rec.record_id = "rec";
  rec.label = MentalState::kNeutral;
  rec.pairs = {QAPair{"health", "sleep?", "fine", 0}};
  FunctionBackend backend = well_formed_backend();
  IcotConfig config;
  CandidateThoughts cands = run_icot(rec, backend, prompts(), config);
  for (const auto& t : cands.thoughts) CHECK(t.category == "health");
}

TEST_CASE("one call per level per category under the one-keyword policy") {
  FunctionBackend backend = well_formed_backend();
  TrackingBackend tracked(backend);
  IcotConfig config;
  config.max_keywords = 1;
  CandidateThoughts cands = run_icot(three_category_record(), tracked, prompts(), config);
  CHECK(tracked.calls() == 3 * 3);       // categories x (aspect + keywords + response)
  CHECK(cands.log.size() == 3 * 3);      // every call logged once
  for (const auto& entry : cands.log) CHECK(entry.status == ParseStatus::kOk);
}

TEST_CASE("every generated chain climbs exactly one level per parent edge") {
  FunctionBackend backend = well_formed_backend();
  IcotConfig config;
  CandidateThoughts cands = run_icot(three_category_record(), backend, prompts(), config);
  const std::vector<QAPair> answered = effective_pairs(three_category_record());
  std::set<std::string> categories;
  for (const auto& p : answered) categories.insert(p.category);

  for (const auto& t : cands.thoughts) {
    CHECK(categories.count(t.category) == 1);  // category closure
    if (t.level == ThoughtLevel::kAspect) {
      CHECK_FALSE(t.parent_id.has_value());
      continue;
    }
    REQUIRE(t.parent_id.has_value());
    const Thought* parent = cands.find(*t.parent_id);
    REQUIRE(parent != nullptr);
    CHECK(static_cast<int>(parent->level) == static_cast<int>(t.level) - 1);
    if (t.level == ThoughtLevel::kResponse) {
      // The transitive parents include exactly one aspect.
      const Thought* grandparent = cands.find(parent->parent_id.value());
      REQUIRE(grandparent != nullptr);
      CHECK(grandparent->level == ThoughtLevel::kAspect);
      CHECK_FALSE(grandparent->parent_id.has_value());
    }
  }
}

TEST_CASE("a category that keeps failing is skipped but logged") {
  FunctionBackend backend([](const PromptRequest& req) -> std::string {
    if (req.user.find("Category: health") != std::string::npos) return "static noise";
    if (req.user.find("ASPECT: <your analysis>") != std::string::npos) return "ASPECT: ok";
    if (req.user.find("KEYWORDS: <word1>") != std::string::npos) return "KEYWORDS: calm";
    return "RESPONSE: seems neutral (3)";
  });
  IcotConfig config;
  CandidateThoughts cands = run_icot(three_category_record(), backend, prompts(), config);
  for (const auto& t : cands.thoughts) CHECK(t.category != "health");
  int health_failures = 0;
  for (const auto& entry : cands.log) {
    if (entry.category == "health" && entry.status == ParseStatus::kParseError) ++health_failures;
  }
  CHECK(health_failures == 3);  // the invariant: skipped categories leave a logged failure
}

TEST_CASE("run_icot fails outright when every category fails") {
  FunctionBackend backend([](const PromptRequest&) { return std::string("never parseable"); });
  IcotConfig config;
  CHECK_THROWS_AS(run_icot(three_category_record(), backend, prompts(), config), GenerationError);
}

TEST_CASE("run_icot under a fixed cassette is byte-identical") {
  // Record one pass against the rule model, then replay it twice.
  FunctionBackend rule = well_formed_backend();
  Cassette cassette;
  RecordingBackend recorder(rule, cassette);
  IcotConfig config;
  const SurveyRecord rec = three_category_record();
  run_icot(rec, recorder, prompts(), config);

  auto replay_json = [&]() {
    cassette.reset_cursors();
    ReplayBackend replay(cassette);
    return run_icot(rec, replay, prompts(), config).to_json().dump();
  };
  const std::string first = replay_json();
  const std::string second = replay_json();
  CHECK(first == second);
  CHECK_FALSE(first.empty());
}
