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

#include "rfot/prompts.hpp"

#include <cctype>

#include "rfot/errors.hpp"
#include "rfot/metrics.hpp"
#include "rfot/util.hpp"

namespace rfot {
namespace {

constexpr std::string_view kSystem =
    "You analyze multi-turn social survey interviews and predict the respondent's "
    "happiness on a 5-level scale (1 = very unhappy, 2 = unhappy, 3 = neutral, "
    "4 = happy, 5 = very happy). Always follow the requested output format exactly.";

constexpr std::string_view kAspect =
    "You are analyzing one category of a survey interview.\n"
    "Category: {category}\n"
    "Question-answer pairs:\n"
    "{pairs}\n"
    "Summarize what these answers reveal about the respondent for this category.\n"
    "Reply with exactly one line in the format:\n"
    "ASPECT: <your analysis>";

constexpr std::string_view kKeywords =
    "Category: {category}\n"
    "Aspect analysis: {aspect}\n"
    "List up to {max_keywords} emotional keywords that capture the respondent's "
    "state for this category.\n"
    "Reply with exactly one line in the format:\n"
    "KEYWORDS: <word1>, <word2>, ...";

constexpr std::string_view kResponse =
    "Category: {category}\n"
    "Aspect analysis: {aspect}\n"
    "Emotional keyword: {keyword}\n"
    "Give a one-sentence partial judgment of the respondent's happiness based on "
    "this category, ending with a candidate level name and its ordinal in "
    "parentheses.\n"
    "Reply with exactly one line in the format:\n"
    "RESPONSE: <sentence> (<ordinal>)";

constexpr std::string_view kValueProbe =
    "Observations about a respondent:\n"
    "{thoughts}\n"
    "Based only on the observations above, predict the respondent's happiness "
    "level.\n"
    "Reply with only the ordinal, a single digit from 1 to 5.";

constexpr std::string_view kTreePredict =
    "Reasoning steps about a respondent:\n"
    "{steps}\n"
    "Following these reasoning steps, predict the respondent's happiness level.\n"
    "Reply with only the ordinal, a single digit from 1 to 5.";

constexpr std::string_view kIo =
    "Survey interview:\n"
    "{pairs}\n"
    "Predict the respondent's happiness level.\n"
    "Reply with only the ordinal, a single digit from 1 to 5.";

constexpr std::string_view kCot =
    "Survey interview:\n"
    "{pairs}\n"
    "Think step by step about what the answers reveal, then predict the "
    "respondent's happiness level.\n"
    "Finish with exactly one line in the format:\n"
    "FINAL: <ordinal>";

constexpr std::string_view kTotPropose =
    "Survey interview:\n"
    "{pairs}\n"
    "Reasoning so far:\n"
    "{steps}\n"
    "Proposal {index} of {breadth}: suggest the next reasoning step toward "
    "judging the respondent's happiness. Reply with one short sentence.";

constexpr std::string_view kTotScore =
    "Survey interview:\n"
    "{pairs}\n"
    "Reasoning so far:\n"
    "{steps}\n"
    "Candidate next step:\n"
    "{candidate}\n"
    "Rate how promising this step is from 1 to 10.\n"
    "Reply with only the number.";

const std::vector<std::pair<const char*, std::string PromptLibrary::*>>& fields() {
  static const std::vector<std::pair<const char*, std::string PromptLibrary::*>> kFields = {
      {"system", &PromptLibrary::system},
      {"aspect", &PromptLibrary::aspect},
      {"keywords", &PromptLibrary::keywords},
      {"response", &PromptLibrary::response},
      {"value_probe", &PromptLibrary::value_probe},
      {"tree_predict", &PromptLibrary::tree_predict},
      {"io", &PromptLibrary::io},
      {"cot", &PromptLibrary::cot},
      {"tot_propose", &PromptLibrary::tot_propose},
      {"tot_score", &PromptLibrary::tot_score},
  };
  return kFields;
}

bool is_bare_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t end = s.size();
  if (s.back() == '.') --end;  // allow "4."
  if (end == 0) return false;
  for (std::size_t i = 0; i < end; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  lib.system = std::string(kSystem);
  lib.aspect = std::string(kAspect);
  lib.keywords = std::string(kKeywords);
  lib.response = std::string(kResponse);
  lib.value_probe = std::string(kValueProbe);
  lib.tree_predict = std::string(kTreePredict);
  lib.io = std::string(kIo);
  lib.cot = std::string(kCot);
  lib.tot_propose = std::string(kTotPropose);
  lib.tot_score = std::string(kTotScore);
  return lib;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (const auto& [name, member] : fields()) {
    const auto path = dir / (std::string(name) + ".txt");
    if (!std::filesystem::exists(path)) {
      throw ConfigError("prompt template missing: " + path.string());
    }
    std::string text = read_text_file(path);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    lib.*member = std::move(text);
  }
  return lib;
}

void PromptLibrary::save_directory(const std::filesystem::path& dir) const {
  for (const auto& [name, member] : fields()) {
    write_text_file(dir / (std::string(name) + ".txt"), this->*member + "\n");
  }
}

std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& vars) {
  std::string out(tmpl);
  for (const auto& [key, value] : vars) {
    const std::string placeholder = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = out.find(placeholder, pos)) != std::string::npos) {
      out.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  }
  return out;
}

std::string render_pairs(const std::vector<QAPair>& pairs) {
  std::string out;
  for (const auto& pair : pairs) {
    out += "- (" + pair.category + ") Q: " + pair.question +
           " A: " + pair.answer.value_or("") + "\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string format_skeleton(std::string_view reply) {
  static constexpr std::string_view kMarkers[] = {kAspectMarker, kKeywordsMarker,
                                                  kResponseMarker, kFinalMarker};
  std::vector<std::string> lines;
  for (const auto& raw : split(reply, '\n')) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    std::string token = "~";
    for (std::string_view marker : kMarkers) {
      if (starts_with(line, marker)) {
        token = std::string(marker) + " ~";
        break;
      }
    }
    if (token == "~" && is_bare_integer(line)) token = "#";
    if (token == "~" && !lines.empty() && lines.back() == "~") continue;
    lines.push_back(std::move(token));
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

double reply_consistency(std::string_view reply, std::string_view expected_skeleton) {
  return consistency(format_skeleton(reply), expected_skeleton);
}

}  // namespace rfot
