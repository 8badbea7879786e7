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

#include "rfot/survey.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rfot/errors.hpp"
#include "rfot/util.hpp"

namespace rfot {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kNumMentalStates> kStateNames = {
    "very unhappy", "unhappy", "neutral", "happy", "very happy"};

struct Row {
  std::string record_id;
  int turn_index = 0;
  std::string category;
  std::string question;
  std::optional<std::string> answer;
  std::string label_name;
};

struct RecordBuilder {
  std::string record_id;
  std::string label_name;
  std::vector<QAPair> pairs;
};

std::string require_string(const json& j, const char* field, std::size_t line) {
  auto it = j.find(field);
  if (it == j.end()) throw ParseError(std::string("missing field '") + field + "'", line);
  if (!it->is_string()) throw ParseError(std::string("field '") + field + "' is not a string", line);
  return it->get<std::string>();
}

Dataset build_dataset(std::string name, const std::vector<Row>& rows) {
  std::vector<RecordBuilder> builders;
  std::map<std::string, std::size_t> index_by_id;
  for (const auto& row : rows) {
    auto [it, inserted] = index_by_id.emplace(row.record_id, builders.size());
    if (inserted) builders.push_back(RecordBuilder{row.record_id, row.label_name, {}});
    RecordBuilder& b = builders[it->second];
    if (b.label_name != row.label_name) {
      throw ValidationError("record '" + row.record_id + "' carries conflicting labels '" +
                            b.label_name + "' and '" + row.label_name + "'");
    }
    b.pairs.push_back(QAPair{row.category, row.question, row.answer, row.turn_index});
  }

  std::vector<SurveyRecord> records;
  records.reserve(builders.size());
  for (auto& b : builders) {
    SurveyRecord rec;
    rec.record_id = b.record_id;
    rec.label = state_from_name(b.label_name);
    std::stable_sort(b.pairs.begin(), b.pairs.end(),
                     [](const QAPair& l, const QAPair& r) { return l.turn_index < r.turn_index; });
    rec.pairs = std::move(b.pairs);
    records.push_back(std::move(rec));
  }
  return dataset_from_records(std::move(name), std::move(records));
}

// Single-line CSV field splitter with RFC-style quoting ("" escapes a quote).
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(current);
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  return line;
}

}  // namespace

int ordinal(MentalState state) { return static_cast<int>(state); }

std::string_view state_name(MentalState state) {
  return kStateNames[static_cast<std::size_t>(ordinal(state) - 1)];
}

MentalState state_from_ordinal(int value) {
  if (value < 1 || value > kNumMentalStates) {
    throw ValidationError("label ordinal out of range [1,5]: " + std::to_string(value));
  }
  return static_cast<MentalState>(value);
}

MentalState state_from_name(std::string_view name) {
  std::string lowered = to_lower(trim(name));
  for (int i = 0; i < kNumMentalStates; ++i) {
    if (lowered == kStateNames[static_cast<std::size_t>(i)]) {
      return static_cast<MentalState>(i + 1);
    }
  }
  throw ValidationError("unknown label name '" + std::string(name) + "'");
}

std::size_t DatasetStats::total() const {
  std::size_t sum = 0;
  for (std::size_t c : label_counts) sum += c;
  return sum;
}

Dataset dataset_from_records(std::string name, std::vector<SurveyRecord> records) {
  int max_turns = 0;
  for (const auto& rec : records) {
    if (rec.record_id.empty()) throw ValidationError("record with empty record_id");
    std::set<int> seen_turns;
    bool any_answered = false;
    for (const auto& pair : rec.pairs) {
      if (pair.category.empty()) {
        throw ValidationError("record '" + rec.record_id + "' turn " +
                              std::to_string(pair.turn_index) + " has an empty category");
      }
      if (pair.question.empty()) {
        throw ValidationError("record '" + rec.record_id + "' turn " +
                              std::to_string(pair.turn_index) + " has an empty question");
      }
      if (!seen_turns.insert(pair.turn_index).second) {
        throw ValidationError("record '" + rec.record_id + "' repeats turn_index " +
                              std::to_string(pair.turn_index));
      }
      if (pair.answer.has_value()) any_answered = true;
    }
    if (!any_answered) {
      throw ValidationError("record '" + rec.record_id + "' has no answered pairs");
    }
    max_turns = std::max(max_turns, static_cast<int>(rec.pairs.size()));
  }
  Dataset ds;
  ds.name = std::move(name);
  ds.records = std::move(records);
  ds.turns_per_record = max_turns;
  return ds;
}

Dataset parse_jsonl_dataset(std::istream& in, std::string name) {
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("row is not a JSON object", line_no);
    Row row;
    row.record_id = require_string(j, "record_id", line_no);
    auto turn = j.find("turn_index");
    if (turn == j.end() || !turn->is_number_integer()) {
      throw ParseError("missing or non-integer field 'turn_index'", line_no);
    }
    row.turn_index = turn->get<int>();
    if (row.turn_index < 0) throw ParseError("turn_index must be >= 0", line_no);
    row.category = require_string(j, "category", line_no);
    row.question = require_string(j, "question", line_no);
    auto ans = j.find("answer");
    if (ans == j.end()) throw ParseError("missing field 'answer'", line_no);
    if (ans->is_null()) {
      row.answer = std::nullopt;
    } else if (ans->is_string()) {
      std::string text = ans->get<std::string>();
      row.answer = text.empty() ? std::nullopt : std::optional<std::string>(std::move(text));
    } else {
      throw ParseError("field 'answer' is not a string", line_no);
    }
    row.label_name = require_string(j, "label_name", line_no);
    rows.push_back(std::move(row));
  }
  return build_dataset(std::move(name), rows);
}

Dataset parse_csv_dataset(std::istream& in, std::string name) {
  std::string line;
  if (!std::getline(in, line)) return build_dataset(std::move(name), {});
  std::size_t line_no = 1;
  auto header = split_csv_line(chomp(line), line_no);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
  for (const char* required :
       {"record_id", "turn_index", "category", "question", "answer", "label_name"}) {
    if (!col.count(required)) {
      throw ParseError(std::string("header is missing column '") + required + "'", 1);
    }
  }

  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()), line_no);
    }
    Row row;
    row.record_id = fields[col["record_id"]];
    try {
      std::size_t pos = 0;
      row.turn_index = std::stoi(fields[col["turn_index"]], &pos);
      if (pos != fields[col["turn_index"]].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("turn_index is not an integer: '" + fields[col["turn_index"]] + "'",
                       line_no);
    }
    if (row.turn_index < 0) throw ParseError("turn_index must be >= 0", line_no);
    row.category = fields[col["category"]];
    row.question = fields[col["question"]];
    std::string answer = fields[col["answer"]];
    row.answer = answer.empty() ? std::nullopt : std::optional<std::string>(std::move(answer));
    row.label_name = fields[col["label_name"]];
    rows.push_back(std::move(row));
  }
  return build_dataset(std::move(name), rows);
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file: " + path.string());
  std::string name = path.stem().string();
  return format == DatasetFormat::kJsonl ? parse_jsonl_dataset(in, name)
                                         : parse_csv_dataset(in, name);
}

void write_jsonl_dataset(const Dataset& ds, std::ostream& out) {
  for (const auto& rec : ds.records) {
    for (const auto& pair : rec.pairs) {
      json j;
      j["record_id"] = rec.record_id;
      j["turn_index"] = pair.turn_index;
      j["category"] = pair.category;
      j["question"] = pair.question;
      j["answer"] = pair.answer.value_or("");
      j["label_name"] = std::string(state_name(rec.label));
      out << j.dump() << '\n';
    }
  }
}

void write_csv_dataset(const Dataset& ds, std::ostream& out) {
  out << "record_id,turn_index,category,question,answer,label_name\n";
  for (const auto& rec : ds.records) {
    for (const auto& pair : rec.pairs) {
      out << csv_escape(rec.record_id) << ',' << pair.turn_index << ','
          << csv_escape(pair.category) << ',' << csv_escape(pair.question) << ','
          << csv_escape(pair.answer.value_or("")) << ','
          << csv_escape(std::string(state_name(rec.label))) << '\n';
    }
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path, DatasetFormat format) {
  std::ostringstream buf;
  if (format == DatasetFormat::kJsonl) {
    write_jsonl_dataset(ds, buf);
  } else {
    write_csv_dataset(ds, buf);
  }
  write_text_file(path, buf.str());
}

DatasetStats dataset_stats(const Dataset& ds) {
  if (ds.records.empty()) throw EmptyInputError("dataset_stats: dataset is empty");
  DatasetStats stats;
  stats.turns_per_record = ds.turns_per_record;
  for (const auto& rec : ds.records) {
    stats.label_counts[static_cast<std::size_t>(ordinal(rec.label) - 1)]++;
  }
  return stats;
}

std::vector<QAPair> effective_pairs(const SurveyRecord& record) {
  std::vector<QAPair> out;
  out.reserve(record.pairs.size());
  for (const auto& pair : record.pairs) {
    if (pair.answer.has_value()) out.push_back(pair);
  }
  return out;
}

}  // namespace rfot
