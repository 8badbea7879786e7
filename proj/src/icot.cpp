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

#include "rfot/icot.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "rfot/errors.hpp"
#include "rfot/metrics.hpp"
#include "rfot/util.hpp"

namespace rfot {
namespace {

using nlohmann::json;

std::string expected_skeleton(ThoughtLevel level) {
  return std::string(level_marker(level)) + " ~";
}

constexpr std::string_view kFormatReminder =
    "\n\nReminder: reply with exactly one line in the requested format, starting with the marker.";

struct Attempted {
  std::optional<std::string> content;
  double consistency = 0.0;
};

// One generation slot: ask, parse, re-ask with the reminder appended on parse
// failure, up to config.parse_retries extra attempts. Every attempt is
// logged; backend failures are logged too, then propagate (replay misses and
// dead transports must abort the run, not silently thin the candidate set).
Attempted ask_with_retries(Backend& llm, const PromptLibrary& prompts, const IcotConfig& config,
                           const std::string& user, const std::string& category,
                           ThoughtLevel level, std::vector<GenerationLogEntry>* log) {
  for (int attempt = 0; attempt <= config.parse_retries; ++attempt) {
    PromptRequest req;
    req.system = prompts.system;
    req.user = attempt == 0 ? user : user + std::string(kFormatReminder);
    req.temperature = config.temperature;
    req.max_tokens = config.max_tokens;

    GenerationLogEntry entry;
    entry.fingerprint = fingerprint(req);
    entry.category = category;
    entry.level = level;
    entry.attempt = attempt;

    Completion completion;
    try {
      completion = llm.complete(req);
    } catch (const Error&) {
      entry.status = ParseStatus::kBackendError;
      if (log) log->push_back(entry);
      throw;
    }
    ParseOutcome parsed = try_parse_thought(completion.text, level);
    entry.consistency = parsed.consistency;
    entry.status = parsed.content ? ParseStatus::kOk : ParseStatus::kParseError;
    if (log) log->push_back(entry);
    if (parsed.content) return Attempted{std::move(parsed.content), parsed.consistency};
  }
  return Attempted{};
}

std::string thought_id(const std::string& record_id, const std::string& category,
                       ThoughtLevel level, int index) {
  const char prefix = level == ThoughtLevel::kAspect ? 'a'
                      : level == ThoughtLevel::kKeyword ? 'k'
                                                        : 'r';
  return record_id + "/" + category + "/" + prefix + std::to_string(index);
}

// Child ids share the parent's record/category prefix; the leaf segment never
// contains '/', so the last separator is always the right split point.
std::string sibling_id(const std::string& parent_id, char prefix, int index) {
  const std::size_t cut = parent_id.rfind('/');
  return parent_id.substr(0, cut + 1) + prefix + std::to_string(index);
}

}  // namespace

std::string_view level_name(ThoughtLevel level) {
  switch (level) {
    case ThoughtLevel::kAspect: return "aspect";
    case ThoughtLevel::kKeyword: return "keyword";
    case ThoughtLevel::kResponse: return "response";
  }
  return "unknown";
}

std::string_view level_marker(ThoughtLevel level) {
  switch (level) {
    case ThoughtLevel::kAspect: return kAspectMarker;
    case ThoughtLevel::kKeyword: return kKeywordsMarker;
    case ThoughtLevel::kResponse: return kResponseMarker;
  }
  return "";
}

std::string_view parse_status_name(ParseStatus status) {
  switch (status) {
    case ParseStatus::kOk: return "ok";
    case ParseStatus::kParseError: return "parse_error";
    case ParseStatus::kBackendError: return "backend_error";
  }
  return "unknown";
}

const Thought* CandidateThoughts::find(std::string_view id) const {
  for (const auto& t : thoughts) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<std::string> CandidateThoughts::ids() const {
  std::vector<std::string> out;
  out.reserve(thoughts.size());
  for (const auto& t : thoughts) out.push_back(t.id);
  return out;
}

json CandidateThoughts::to_json() const {
  json j;
  j["record_id"] = record_id;
  json ts = json::array();
  for (const auto& t : thoughts) {
    json tj;
    tj["id"] = t.id;
    tj["level"] = std::string(level_name(t.level));
    tj["category"] = t.category;
    tj["text"] = t.text;
    if (t.parent_id) tj["parent_id"] = *t.parent_id;
    if (t.importance) tj["importance"] = *t.importance;
    ts.push_back(std::move(tj));
  }
  j["thoughts"] = std::move(ts);
  json lg = json::array();
  for (const auto& e : log) {
    lg.push_back({{"fingerprint", e.fingerprint},
                  {"category", e.category},
                  {"level", std::string(level_name(e.level))},
                  {"attempt", e.attempt},
                  {"status", std::string(parse_status_name(e.status))},
                  {"consistency", e.consistency}});
  }
  j["generation_log"] = std::move(lg);
  return j;
}

ParseOutcome try_parse_thought(std::string_view raw, ThoughtLevel level) {
  ParseOutcome out;
  out.consistency = consistency(format_skeleton(raw), expected_skeleton(level));
  const std::string_view marker = level_marker(level);
  for (const auto& line : split(raw, '\n')) {
    std::string t = trim(line);
    if (starts_with(t, marker)) {
      std::string content = trim(t.substr(marker.size()));
      if (content.empty()) {
        out.error = std::string("empty content after marker ") + std::string(marker);
        return out;
      }
      out.content = std::move(content);
      return out;
    }
  }
  out.error = "reply has no '" + std::string(marker) + "' marker";
  return out;
}

ParsedReply parse_thought(std::string_view raw, ThoughtLevel level) {
  ParseOutcome out = try_parse_thought(raw, level);
  if (!out.content) throw ParseError(out.error);
  return ParsedReply{std::move(*out.content), out.consistency};
}

Thought generate_aspect(const std::vector<QAPair>& category_pairs, const std::string& category,
                        Backend& llm, const PromptLibrary& prompts, const IcotConfig& config,
                        const std::string& record_id, std::vector<GenerationLogEntry>* log) {
  std::vector<QAPair> answered;
  for (const auto& p : category_pairs) {
    if (p.answer.has_value()) answered.push_back(p);
  }
  if (answered.empty()) {
    throw EmptyInputError("generate_aspect: no answered pairs in category '" + category + "'");
  }
  const std::string user = render_template(
      prompts.aspect, {{"category", category}, {"pairs", render_pairs(answered)}});
  Attempted got = ask_with_retries(llm, prompts, config, user, category, ThoughtLevel::kAspect, log);
  if (!got.content) {
    throw GenerationError("aspect generation failed for category '" + category + "'");
  }
  Thought t;
  t.id = thought_id(record_id, category, ThoughtLevel::kAspect, 0);
  t.level = ThoughtLevel::kAspect;
  t.category = category;
  t.text = std::move(*got.content);
  return t;
}

std::vector<Thought> extract_keywords(const Thought& aspect, Backend& llm,
                                      const PromptLibrary& prompts, const IcotConfig& config,
                                      std::vector<GenerationLogEntry>* log) {
  if (aspect.level != ThoughtLevel::kAspect) {
    throw ValidationError("extract_keywords: parent thought is not an aspect");
  }
  const std::string user = render_template(
      prompts.keywords, {{"category", aspect.category},
                         {"aspect", aspect.text},
                         {"max_keywords", std::to_string(config.max_keywords)}});
  Attempted got =
      ask_with_retries(llm, prompts, config, user, aspect.category, ThoughtLevel::kKeyword, log);
  if (!got.content) {
    throw GenerationError("keyword extraction failed for category '" + aspect.category + "'");
  }

  std::vector<Thought> out;
  std::set<std::string> seen;  // case-insensitive dedup
  for (const auto& piece : split(*got.content, ',')) {
    std::string word = trim(piece);
    if (word.empty()) continue;
    if (!seen.insert(to_lower(word)).second) continue;
    Thought t;
    t.id = sibling_id(aspect.id, 'k', static_cast<int>(out.size()));
    t.level = ThoughtLevel::kKeyword;
    t.category = aspect.category;
    t.text = std::move(word);
    t.parent_id = aspect.id;
    out.push_back(std::move(t));
    if (static_cast<int>(out.size()) >= config.max_keywords) break;
  }
  if (out.empty()) {
    throw GenerationError("keyword reply for category '" + aspect.category +
                          "' contained no keywords");
  }
  return out;
}

Thought generate_response(const Thought& keyword, const std::string& aspect_text, Backend& llm,
                          const PromptLibrary& prompts, const IcotConfig& config,
                          std::vector<GenerationLogEntry>* log) {
  if (keyword.level != ThoughtLevel::kKeyword) {
    throw ValidationError("generate_response: parent thought is not a keyword");
  }
  const std::string user = render_template(
      prompts.response,
      {{"category", keyword.category}, {"aspect", aspect_text}, {"keyword", keyword.text}});
  Attempted got =
      ask_with_retries(llm, prompts, config, user, keyword.category, ThoughtLevel::kResponse, log);
  if (!got.content) {
    throw GenerationError("response generation failed for category '" + keyword.category + "'");
  }
  Thought t;
  t.id = sibling_id(keyword.id, 'r', 0);
  t.level = ThoughtLevel::kResponse;
  t.category = keyword.category;
  t.text = std::move(*got.content);
  t.parent_id = keyword.id;
  return t;
}

CandidateThoughts run_icot(const SurveyRecord& record, Backend& llm, const PromptLibrary& prompts,
                           const IcotConfig& config) {
  const std::vector<QAPair> answered = effective_pairs(record);
  if (answered.empty()) {
    throw ValidationError("run_icot: record '" + record.record_id + "' has no answered pairs");
  }

  // Categories in first-turn order for the call schedule; the merge below
  // re-sorts by category name so output never depends on scheduling.
  std::vector<std::string> categories;
  std::map<std::string, std::vector<QAPair>> pairs_by_category;
  for (const auto& p : answered) {
    auto [it, inserted] = pairs_by_category.emplace(p.category, std::vector<QAPair>{});
    if (inserted) categories.push_back(p.category);
    it->second.push_back(p);
  }

  struct CategoryResult {
    std::vector<Thought> thoughts;
    std::vector<GenerationLogEntry> log;
  };
  std::vector<CategoryResult> results(categories.size());

  parallel_for(categories.size(), config.jobs, [&](std::size_t i) {
    const std::string& category = categories[i];
    CategoryResult& res = results[i];
    Thought aspect;
    try {
      aspect = generate_aspect(pairs_by_category[category], category, llm, prompts, config,
                               record.record_id, &res.log);
    } catch (const GenerationError&) {
      return;  // failure already logged; category skipped
    }
    res.thoughts.push_back(aspect);
    std::vector<Thought> keywords;
    try {
      keywords = extract_keywords(aspect, llm, prompts, config, &res.log);
    } catch (const GenerationError&) {
      return;
    }
    for (const auto& k : keywords) res.thoughts.push_back(k);
    try {
      // Greedy: the leading keyword is the one fed forward.
      Thought response = generate_response(keywords.front(), aspect.text, llm, prompts, config,
                                           &res.log);
      res.thoughts.push_back(std::move(response));
    } catch (const GenerationError&) {
      return;
    }
  });

  CandidateThoughts out;
  out.record_id = record.record_id;
  std::vector<std::size_t> order(categories.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return categories[l] < categories[r]; });
  for (std::size_t i : order) {
    for (auto& t : results[i].thoughts) out.thoughts.push_back(std::move(t));
    for (auto& e : results[i].log) out.log.push_back(std::move(e));
  }
  if (out.thoughts.empty()) {
    throw GenerationError("run_icot: every category failed generation for record '" +
                          record.record_id + "'");
  }
  return out;
}

}  // namespace rfot
