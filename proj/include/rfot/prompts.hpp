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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfot/survey.hpp"

namespace rfot {

/// The versioned prompt templates. Placeholders use {name} syntax. The
/// builtin set ships compiled in; from_directory loads the same-named .txt
/// assets so deployments can override wording without rebuilding.
struct PromptLibrary {
  std::string system;
  std::string aspect;        // {category} {pairs}
  std::string keywords;      // {category} {aspect} {max_keywords}
  std::string response;      // {category} {aspect} {keyword}
  std::string value_probe;   // {thoughts}
  std::string tree_predict;  // {steps}
  std::string io;            // {pairs}
  std::string cot;           // {pairs}
  std::string tot_propose;   // {pairs} {steps} {index} {breadth}
  std::string tot_score;     // {pairs} {steps} {candidate}

  static PromptLibrary builtin();
  static PromptLibrary from_directory(const std::filesystem::path& dir);
  void save_directory(const std::filesystem::path& dir) const;

  bool operator==(const PromptLibrary&) const = default;
};

/// Replaces every {key} occurrence; unknown placeholders are left alone.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& vars);

/// Renders answered question-answer pairs as prompt bullet lines.
std::string render_pairs(const std::vector<QAPair>& pairs);

// Output markers the parsers look for.
inline constexpr std::string_view kAspectMarker = "ASPECT:";
inline constexpr std::string_view kKeywordsMarker = "KEYWORDS:";
inline constexpr std::string_view kResponseMarker = "RESPONSE:";
inline constexpr std::string_view kFinalMarker = "FINAL:";

// Structural skeletons replies are scored against.
inline constexpr std::string_view kOrdinalReplySkeleton = "#";
inline constexpr std::string_view kCotReplySkeleton = "~\nFINAL: ~";
inline constexpr std::string_view kFreeformSkeleton = "~";

/// Collapses a reply to its structural skeleton: marker lines keep their
/// marker, bare integers become '#', everything else becomes '~' with
/// consecutive '~' lines merged. Comparing skeletons measures format
/// adherence without penalizing free-text content.
std::string format_skeleton(std::string_view reply);

/// Format-adherence score of a reply against an expected skeleton.
double reply_consistency(std::string_view reply, std::string_view expected_skeleton);

}  // namespace rfot
