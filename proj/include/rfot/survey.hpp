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

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rfot {

/// Five-level ordinal happiness label. Ordinal 1 is "very unhappy",
/// 5 is "very happy"; the scale is fixed and other scales are rejected
/// at load time.
enum class MentalState : int {
  kVeryUnhappy = 1,
  kUnhappy = 2,
  kNeutral = 3,
  kHappy = 4,
  kVeryHappy = 5,
};

inline constexpr int kNumMentalStates = 5;

int ordinal(MentalState state);
std::string_view state_name(MentalState state);
MentalState state_from_ordinal(int ordinal);        // throws ValidationError
MentalState state_from_name(std::string_view name); // throws ValidationError

/// One questionnaire turn: a thematic category, the question asked, and the
/// respondent's answer. A missing answer means skip logic suppressed the
/// question for this respondent.
struct QAPair {
  std::string category;
  std::string question;
  std::optional<std::string> answer;
  int turn_index = 0;

  bool operator==(const QAPair&) const = default;
};

/// One respondent's multi-turn interview plus its ground-truth label.
struct SurveyRecord {
  std::string record_id;
  std::vector<QAPair> pairs;
  MentalState label = MentalState::kNeutral;

  bool operator==(const SurveyRecord&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<SurveyRecord> records;
  int turns_per_record = 0;  // max turn count over records

  bool operator==(const Dataset&) const = default;
};

struct DatasetStats {
  std::array<std::size_t, kNumMentalStates> label_counts{};  // index = ordinal - 1
  int turns_per_record = 0;

  std::size_t total() const;
};

enum class DatasetFormat { kJsonl, kCsv };

/// Row format, both encodings: record_id, turn_index, category, question,
/// answer, label_name. An empty answer cell means "skipped".
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
Dataset parse_jsonl_dataset(std::istream& in, std::string name);
Dataset parse_csv_dataset(std::istream& in, std::string name);

void save_dataset(const Dataset& ds, const std::filesystem::path& path, DatasetFormat format);
void write_jsonl_dataset(const Dataset& ds, std::ostream& out);
void write_csv_dataset(const Dataset& ds, std::ostream& out);

/// Groups rows into validated records. Throws ValidationError on label or
/// invariant problems.
Dataset dataset_from_records(std::string name, std::vector<SurveyRecord> records);

DatasetStats dataset_stats(const Dataset& ds);  // throws EmptyInputError on empty

/// The pairs the respondent actually answered, original order preserved.
/// This is the observable effect of questionnaire skip logic.
std::vector<QAPair> effective_pairs(const SurveyRecord& record);

}  // namespace rfot
