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

#include <memory>

#include "rfot/baselines.hpp"
#include "rfot/errors.hpp"
#include "rfot/llm.hpp"
#include "rfot/rng.hpp"

using namespace rfot;

namespace {

const PromptLibrary& prompts() {
  static const PromptLibrary lib = PromptLibrary::builtin();
  return lib;
}

SurveyRecord record() {
  SurveyRecord rec;
  rec.record_id = "r";
  rec.label = MentalState::kHappy;
  rec.pairs = {QAPair{"economics", "income?", "stable", 0},
               QAPair{"health", "sleep?", "fine", 1}};
  return rec;
}

// Scripts the single io/cot prompt for the fixture record.
std::unique_ptr<ScriptedBackend> script_reply(const std::string& tmpl_name,
                                              const std::string& reply, double temperature) {
  auto backend = std::make_unique<ScriptedBackend>();
  const PromptLibrary& lib = prompts();
  const std::string& tmpl = tmpl_name == "io" ? lib.io : lib.cot;
  PromptRequest req;
  req.system = lib.system;
  req.user = render_template(tmpl, {{"pairs", render_pairs(effective_pairs(record()))}});
  req.temperature = temperature;
  backend->script(req, reply);
  return backend;
}

}  // namespace

TEST_CASE("io: bare ordinal, lenient extraction, and parse failure") {
  StrategyParams params;
  {
    auto backend = script_reply("io", "4", params.extract_temperature);
    CHECK(io_predict(record(), *backend, prompts(), params).label == MentalState::kHappy);
  }
  {
    auto backend = script_reply("io", "Label: 5", params.extract_temperature);
    BaselineResult r = io_predict(record(), *backend, prompts(), params);
    CHECK(r.label == MentalState::kVeryHappy);
    CHECK(r.consistencies[0] < 1.0);  // format drifted even though parsing recovered
  }
  {
    auto backend = script_reply("io", "banana", params.extract_temperature);
    CHECK_THROWS_AS(io_predict(record(), *backend, prompts(), params), PredictionError);
  }
}

TEST_CASE("cot: FINAL line parsing") {
  StrategyParams params;
  {
    auto backend =
        script_reply("cot", "Step by step, things look fair.\nFINAL: 3", params.gen_temperature);
    BaselineResult r = cot_predict(record(), *backend, prompts(), params);
    CHECK(r.label == MentalState::kNeutral);
    CHECK(r.consistencies[0] == doctest::Approx(1.0));
  }
  {
    auto backend =
        script_reply("cot", "thinking but never concluding", params.gen_temperature);
    CHECK_THROWS_AS(cot_predict(record(), *backend, prompts(), params), PredictionError);
  }
  // The LAST final line wins when the chain restates it.
  {
    auto backend =
        script_reply("cot", "FINAL: 2\nwait, reconsider\nFINAL: 5", params.gen_temperature);
    CHECK(cot_predict(record(), *backend, prompts(), params).label == MentalState::kVeryHappy);
  }
}

TEST_CASE("cot is deterministic under a fixed cassette") {
  StrategyParams params;
  auto run_once = [&]() {
    auto backend = script_reply("cot", "reasoning\nFINAL: 4", params.gen_temperature);
    return cot_predict(record(), *backend, prompts(), params).label;
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("sc_cot majority-votes its chains") {
  StrategyParams params;
  ScriptedBackend backend;
  const std::string user =
      render_template(prompts().cot, {{"pairs", render_pairs(effective_pairs(record()))}});
  PromptRequest req;
  req.system = prompts().system;
  req.user = user;
  req.temperature = params.gen_temperature;
  backend.script(req, "a\nFINAL: 4");
  backend.script(req, "b\nFINAL: 4");
  backend.script(req, "c\nFINAL: 5");
  SeededRng rng(1);
  BaselineResult r = sc_cot_predict(record(), backend, prompts(), params, 3, rng);
  CHECK(r.label == MentalState::kHappy);
  CHECK(r.consistencies.size() == 3);
}

TEST_CASE("sc_cot with one chain equals cot on the same cassette") {
  StrategyParams params;
  SeededRng rng(2);
  auto for_cot = script_reply("cot", "only chain\nFINAL: 2", params.gen_temperature);
  auto for_sc = script_reply("cot", "only chain\nFINAL: 2", params.gen_temperature);
  CHECK(cot_predict(record(), *for_cot, prompts(), params).label ==
        sc_cot_predict(record(), *for_sc, prompts(), params, 1, rng).label);
  CHECK_THROWS_AS(sc_cot_predict(record(), *for_sc, prompts(), params, 0, rng), SizeError);
}

TEST_CASE("sc_cot backend calls scale linearly with the chain count") {
  StrategyParams params;
  for (std::size_t chains : {1u, 3u, 5u}) {
    FunctionBackend inner([](const PromptRequest&) { return std::string("x\nFINAL: 3"); });
    TrackingBackend tracked(inner);
    SeededRng rng(3);
    sc_cot_predict(record(), tracked, prompts(), params, chains, rng);
    CHECK(tracked.calls() == chains);
  }
}

TEST_CASE("tot carries the best-scored candidate forward") {
  StrategyParams params;
  // Rule backend: proposals are named by their index; the scorer likes the
  // second candidate; extraction answers 5 only if the chosen step was cand-2.
  FunctionBackend inner([](const PromptRequest& req) -> std::string {
    if (req.user.find("Proposal 1 of 2") != std::string::npos) return "cand-1";
    if (req.user.find("Proposal 2 of 2") != std::string::npos) return "cand-2";
    if (req.user.find("Rate how promising") != std::string::npos) {
      return req.user.find("cand-2") != std::string::npos ? "9" : "3";
    }
    if (req.user.find("Reasoning steps") != std::string::npos) {
      return req.user.find("cand-2") != std::string::npos ? "5" : "1";
    }
    return "?";
  });
  TrackingBackend tracked(inner);
  SeededRng rng(4);
  BaselineResult r = tot_predict(record(), tracked, prompts(), params, 2, 1, rng);
  CHECK(r.label == MentalState::kVeryHappy);  // scores [3,9] carried cand-2 forward
  CHECK(tracked.calls() == 1 * (2 + 2) + 1);
}

TEST_CASE("tot call count is depth x (breadth + breadth) + 1") {
  StrategyParams params;
  FunctionBackend inner([](const PromptRequest& req) -> std::string {
    if (req.user.find("Rate how promising") != std::string::npos) return "7";
    if (req.user.find("Reasoning steps") != std::string::npos) return "3";
    return "some step";
  });
  for (auto [breadth, depth] : std::vector<std::pair<std::size_t, std::size_t>>{
           {1, 1}, {3, 2}, {2, 3}}) {
    TrackingBackend tracked(inner);
    SeededRng rng(5);
    tot_predict(record(), tracked, prompts(), params, breadth, depth, rng);
    CHECK(tracked.calls() == depth * (breadth + breadth) + 1);
  }
  SeededRng rng(6);
  CHECK_THROWS_AS(tot_predict(record(), inner, prompts(), params, 0, 1, rng), SizeError);
}

TEST_CASE("tot at breadth one and depth one degenerates to chain + value + extract") {
  StrategyParams params;
  FunctionBackend inner([](const PromptRequest& req) -> std::string {
    if (req.user.find("Rate how promising") != std::string::npos) return "8";
    if (req.user.find("Reasoning steps") != std::string::npos) return "2";
    return "single reasoning step";
  });
  TrackingBackend tracked(inner);
  SeededRng rng(7);
  BaselineResult r = tot_predict(record(), tracked, prompts(), params, 1, 1, rng);
  CHECK(tracked.calls() == 3);  // one proposal, one score, one extraction
  CHECK(r.label == MentalState::kUnhappy);
}
