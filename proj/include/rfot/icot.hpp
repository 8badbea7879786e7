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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfot/llm.hpp"
#include "rfot/prompts.hpp"
#include "rfot/survey.hpp"

namespace rfot {

/// Generation hierarchy: an aspect analysis per category, emotional keywords
/// extracted from it, and a response-level partial judgment.
enum class ThoughtLevel : int {
  kAspect = 1,
  kKeyword = 2,
  kResponse = 3,
};

std::string_view level_name(ThoughtLevel level);
std::string_view level_marker(ThoughtLevel level);

/// One generated reasoning unit. Keywords point at their aspect, responses at
/// their keyword; aspects have no parent. importance is filled once thoughts
/// have been scored.
struct Thought {
  std::string id;
  ThoughtLevel level = ThoughtLevel::kAspect;
  std::string category;
  std::string text;
  std::optional<std::string> parent_id;
  std::optional<double> importance;

  bool operator==(const Thought&) const = default;
};

enum class ParseStatus { kOk, kParseError, kBackendError };
std::string_view parse_status_name(ParseStatus status);

struct GenerationLogEntry {
  std::string fingerprint;
  std::string category;
  ThoughtLevel level = ThoughtLevel::kAspect;
  int attempt = 0;
  ParseStatus status = ParseStatus::kOk;
  double consistency = 0.0;
};

/// All candidate thoughts generated for one record, grouped by category, plus
/// the audit log of every generation attempt.
struct CandidateThoughts {
  std::string record_id;
  std::vector<Thought> thoughts;
  std::vector<GenerationLogEntry> log;

  const Thought* find(std::string_view id) const;
  std::vector<std::string> ids() const;
  nlohmann::json to_json() const;
};

struct IcotConfig {
  int max_keywords = 3;
  int parse_retries = 2;  // re-asks after the first failed parse
  double temperature = 0.7;
  int max_tokens = 256;
  int jobs = 1;  // categories processed concurrently when > 1
};

struct ParsedReply {
  std::string content;
  double consistency = 0.0;  // reply skeleton vs the level's expected skeleton
};

/// Extracts the content after the level's marker. The consistency score is
/// computed whether or not parsing succeeds.
ParsedReply parse_thought(std::string_view raw, ThoughtLevel level);  // throws ParseError
struct ParseOutcome {
  std::optional<std::string> content;
  double consistency = 0.0;
  std::string error;
};
ParseOutcome try_parse_thought(std::string_view raw, ThoughtLevel level);

Thought generate_aspect(const std::vector<QAPair>& category_pairs, const std::string& category,
                        Backend& llm, const PromptLibrary& prompts, const IcotConfig& config,
                        const std::string& record_id, std::vector<GenerationLogEntry>* log);

std::vector<Thought> extract_keywords(const Thought& aspect, Backend& llm,
                                      const PromptLibrary& prompts, const IcotConfig& config,
                                      std::vector<GenerationLogEntry>* log);

Thought generate_response(const Thought& keyword, const std::string& aspect_text, Backend& llm,
                          const PromptLibrary& prompts, const IcotConfig& config,
                          std::vector<GenerationLogEntry>* log);

/// Runs the full hierarchy for every answered category of the record. Each
/// level feeds greedily on the best-parsed output of the previous one: one
/// aspect per category, one keywords reply split into at most max_keywords
/// thoughts, one response grown from the leading keyword. Output is merged
/// sorted by category so the result is schedule-independent.
CandidateThoughts run_icot(const SurveyRecord& record, Backend& llm,
                           const PromptLibrary& prompts, const IcotConfig& config);

}  // namespace rfot
