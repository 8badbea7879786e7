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

#include <sstream>

#include "rfot/errors.hpp"
#include "rfot/rng.hpp"
#include "rfot/survey.hpp"

using namespace rfot;

namespace {

std::string jsonl_row(const std::string& record_id, int turn, const std::string& category,
                      const std::string& question, const std::string& answer,
                      const std::string& label) {
  return "{\"record_id\":\"" + record_id + "\",\"turn_index\":" + std::to_string(turn) +
         ",\"category\":\"" + category + "\",\"question\":\"" + question + "\",\"answer\":\"" +
         answer + "\",\"label_name\":\"" + label + "\"}\n";
}

Dataset random_dataset(SeededRng& rng, std::size_t n_records) {
  static const char* kCats[] = {"personal", "economics", "health", "leisure"};
  std::vector<SurveyRecord> records;
  for (std::size_t i = 0; i < n_records; ++i) {
    SurveyRecord rec;
    rec.record_id = "rec" + std::to_string(i);
    rec.label = state_from_ordinal(1 + static_cast<int>(rng.below(5)));
    const int turns = 2 + static_cast<int>(rng.below(5));
    for (int t = 0; t < turns; ++t) {
      QAPair p;
      p.category = kCats[rng.below(4)];
      p.question = "q" + std::to_string(t);
      p.turn_index = t;
      if (rng.below(4) != 0 || t == turns - 1) {  // last turn answered keeps records valid
        p.answer = "a" + std::to_string(rng.below(100));
      }
      rec.pairs.push_back(std::move(p));
    }
    records.push_back(std::move(rec));
  }
  return dataset_from_records("random", std::move(records));
}

}  // namespace

TEST_CASE("label scale is a bijection between ordinals and names") {
  CHECK(ordinal(MentalState::kVeryUnhappy) == 1);
  CHECK(ordinal(MentalState::kVeryHappy) == 5);
  CHECK(state_name(MentalState::kVeryUnhappy) == "very unhappy");
  CHECK(state_name(MentalState::kVeryHappy) == "very happy");
  for (int i = 1; i <= 5; ++i) {
    CHECK(ordinal(state_from_name(state_name(state_from_ordinal(i)))) == i);
  }
  CHECK(ordinal(state_from_name("Happy")) == 4);  // case-insensitive
  CHECK_THROWS_AS(state_from_name("ecstatic"), ValidationError);
  CHECK_THROWS_AS(state_from_ordinal(0), ValidationError);
  CHECK_THROWS_AS(state_from_ordinal(6), ValidationError);
}

TEST_CASE("jsonl load: one record with three answered pairs") {
  std::istringstream in(jsonl_row("r1", 0, "economics", "income?", "stable", "happy") +
                        jsonl_row("r1", 1, "health", "sleep?", "fine", "happy") +
                        jsonl_row("r1", 2, "personal", "family?", "close", "happy"));
  Dataset ds = parse_jsonl_dataset(in, "t");
  REQUIRE(ds.records.size() == 1);
  CHECK(ds.records[0].pairs.size() == 3);
  CHECK(ordinal(ds.records[0].label) == 4);
  CHECK(ds.turns_per_record == 3);
}

TEST_CASE("jsonl load: record with only empty answers is rejected") {
  std::istringstream in(jsonl_row("r1", 0, "economics", "income?", "", "happy") +
                        jsonl_row("r1", 1, "health", "sleep?", "", "happy"));
  CHECK_THROWS_AS(parse_jsonl_dataset(in, "t"), ValidationError);
}

TEST_CASE("jsonl load: ESS-shaped file reports 102 turns per record") {
  std::string text;
  for (int t = 0; t < 102; ++t) {
    text += jsonl_row("e1", t, "wellbeing", "q" + std::to_string(t), "a", "neutral");
  }
  std::istringstream in(text);
  Dataset ds = parse_jsonl_dataset(in, "ess_shaped");
  CHECK(ds.turns_per_record == 102);
  CHECK(ds.records.size() == 1);
}

TEST_CASE("jsonl load: malformed rows name the line number") {
  std::istringstream in(jsonl_row("r1", 0, "c", "q", "a", "happy") + "{not json}\n");
  try {
    parse_jsonl_dataset(in, "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream missing("{\"record_id\":\"r\",\"turn_index\":0}\n");
  CHECK_THROWS_AS(parse_jsonl_dataset(missing, "t"), ParseError);
}

TEST_CASE("jsonl load: unknown label names are a validation error") {
  std::istringstream in(jsonl_row("r1", 0, "c", "q", "a", "elated"));
  CHECK_THROWS_AS(parse_jsonl_dataset(in, "t"), ValidationError);
}

TEST_CASE("validation: duplicate turn or conflicting label") {
  std::istringstream dup(jsonl_row("r1", 0, "c", "q", "a", "happy") +
                         jsonl_row("r1", 0, "c", "q2", "b", "happy"));
  CHECK_THROWS_AS(parse_jsonl_dataset(dup, "t"), ValidationError);
  std::istringstream conflict(jsonl_row("r1", 0, "c", "q", "a", "happy") +
                              jsonl_row("r1", 1, "c", "q2", "b", "neutral"));
  CHECK_THROWS_AS(parse_jsonl_dataset(conflict, "t"), ValidationError);
}

TEST_CASE("csv load matches the jsonl column contract") {
  std::istringstream in(
      "record_id,turn_index,category,question,answer,label_name\n"
      "r1,0,economics,\"How, exactly?\",\"He said \"\"fine\"\"\",happy\n"
      "r1,1,health,sleep?,,happy\n");
  Dataset ds = parse_csv_dataset(in, "t");
  REQUIRE(ds.records.size() == 1);
  CHECK(ds.records[0].pairs[0].question == "How, exactly?");
  CHECK(ds.records[0].pairs[0].answer == "He said \"fine\"");
  CHECK_FALSE(ds.records[0].pairs[1].answer.has_value());  // empty cell = skipped

  std::istringstream bad_header("record_id,turn_index,category,question,answer\nr,0,c,q,a\n");
  CHECK_THROWS_AS(parse_csv_dataset(bad_header, "t"), ParseError);
}

TEST_CASE("dataset_stats reproduces a CGSS-shaped fixture exactly") {
  const std::array<std::size_t, 5> expected = {77, 315, 630, 1743, 422};
  std::vector<SurveyRecord> records;
  std::size_t id = 0;
  for (int label = 1; label <= 5; ++label) {
    for (std::size_t i = 0; i < expected[static_cast<std::size_t>(label - 1)]; ++i) {
      SurveyRecord rec;
      rec.record_id = "c" + std::to_string(id++);
      rec.label = state_from_ordinal(label);
      rec.pairs.reserve(124);
      for (int t = 0; t < 124; ++t) {
        rec.pairs.push_back(QAPair{"c", "q", "a", t});
      }
      records.push_back(std::move(rec));
    }
  }
  Dataset ds = dataset_from_records("cgss_shaped", std::move(records));
  DatasetStats stats = dataset_stats(ds);
  CHECK(stats.label_counts == expected);
  CHECK(stats.turns_per_record == 124);
  CHECK(stats.total() == ds.records.size());
}

TEST_CASE("dataset_stats: single neutral record") {
  Dataset ds = dataset_from_records(
      "one", {SurveyRecord{"r", {QAPair{"c", "q", "a", 0}}, MentalState::kNeutral}});
  DatasetStats stats = dataset_stats(ds);
  CHECK(stats.label_counts == std::array<std::size_t, 5>{0, 0, 1, 0, 0});
  CHECK_THROWS_AS(dataset_stats(Dataset{}), EmptyInputError);
}

TEST_CASE("dataset_stats is additive over concatenation") {
  SeededRng rng(11);
  Dataset a = random_dataset(rng, 17);
  Dataset b = random_dataset(rng, 23);
  std::vector<SurveyRecord> merged = a.records;
  for (auto rec : b.records) {
    rec.record_id += "_b";  // keep ids unique
    merged.push_back(std::move(rec));
  }
  Dataset both = dataset_from_records("both", std::move(merged));

  // Counting oracle: tally the labels directly.
  std::array<std::size_t, 5> direct{};
  for (const auto& rec : both.records) direct[static_cast<std::size_t>(ordinal(rec.label) - 1)]++;

  DatasetStats sa = dataset_stats(a);
  DatasetStats sb = dataset_stats(b);
  DatasetStats sboth = dataset_stats(both);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(sboth.label_counts[i] == sa.label_counts[i] + sb.label_counts[i]);
    CHECK(sboth.label_counts[i] == direct[i]);
  }
  CHECK(sboth.total() == both.records.size());
}

TEST_CASE("effective_pairs keeps answered turns in order") {
  SurveyRecord rec;
  rec.record_id = "r";
  rec.label = MentalState::kNeutral;
  for (int t = 0; t < 6; ++t) {
    QAPair p{"c", "q" + std::to_string(t), std::nullopt, t};
    if (t == 0 || t == 2 || t == 5) p.answer = "a" + std::to_string(t);
    rec.pairs.push_back(std::move(p));
  }
  auto eff = effective_pairs(rec);
  REQUIRE(eff.size() == 3);
  CHECK(eff[0].turn_index == 0);
  CHECK(eff[1].turn_index == 2);
  CHECK(eff[2].turn_index == 5);

  SurveyRecord full = rec;
  for (auto& p : full.pairs) p.answer = "x";
  CHECK(effective_pairs(full) == full.pairs);  // identity when nothing skipped
}

TEST_CASE("different skip patterns give different effective lengths") {
  auto make = [](std::vector<bool> answered) {
    SurveyRecord rec{"r", {}, MentalState::kHappy};
    for (std::size_t t = 0; t < answered.size(); ++t) {
      QAPair p{"c", "q", std::nullopt, static_cast<int>(t)};
      if (answered[t]) p.answer = "a";
      rec.pairs.push_back(std::move(p));
    }
    return rec;
  };
  CHECK(effective_pairs(make({true, true, true, true})).size() == 4);
  CHECK(effective_pairs(make({true, false, false, true})).size() == 2);
}

TEST_CASE("effective_pairs is a subsequence with no absent answers") {
  SeededRng rng(5);
  Dataset ds = random_dataset(rng, 25);
  for (const auto& rec : ds.records) {
    auto eff = effective_pairs(rec);
    std::size_t cursor = 0;
    for (const auto& p : eff) {
      CHECK(p.answer.has_value());
      while (cursor < rec.pairs.size() && !(rec.pairs[cursor] == p)) ++cursor;
      CHECK(cursor < rec.pairs.size());  // found, in order
      ++cursor;
    }
  }
}

TEST_CASE("save then load is the identity on validated records") {
  SeededRng rng(7);
  for (int round = 0; round < 5; ++round) {
    Dataset ds = random_dataset(rng, 8);
    for (DatasetFormat format : {DatasetFormat::kJsonl, DatasetFormat::kCsv}) {
      std::ostringstream buf;
      if (format == DatasetFormat::kJsonl) {
        write_jsonl_dataset(ds, buf);
      } else {
        write_csv_dataset(ds, buf);
      }
      std::istringstream in(buf.str());
      Dataset loaded = format == DatasetFormat::kJsonl ? parse_jsonl_dataset(in, ds.name)
                                                       : parse_csv_dataset(in, ds.name);
      CHECK(loaded == ds);
    }
  }
}
