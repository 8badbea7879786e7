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

#include "rfot/runner.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <set>
#include <sstream>

#include "rfot/errors.hpp"
#include "rfot/forest.hpp"
#include "rfot/http_backend.hpp"
#include "rfot/rng.hpp"
#include "rfot/strategy.hpp"
#include "rfot/util.hpp"

namespace rfot {
namespace {

using nlohmann::json;

std::filesystem::path resume_marker_path(const std::string& cassette_path) {
  return std::filesystem::path(cassette_path + ".resume.json");
}

void validate_config(const RunConfig& config) {
  if (config.sample_limit == 0) throw ConfigError("sample_limit must be >= 1");
  if (config.strategies.empty()) throw ConfigError("no strategy selected");
  if (config.dataset_path.empty()) throw ConfigError("no dataset path given");
  switch (config.backend.mode) {
    case BackendMode::kReplay:
      if (config.backend.cassette_path.empty()) {
        throw ConfigError("replay mode needs a cassette path");
      }
      break;
    case BackendMode::kLive:
      if (config.backend.url.empty() || config.backend.model.empty()) {
        throw ConfigError("live mode needs a backend URL and model name");
      }
      break;
    case BackendMode::kRecord:
      if (config.backend.cassette_path.empty() || config.backend.url.empty() ||
          config.backend.model.empty()) {
        throw ConfigError("record mode needs a cassette path, backend URL and model name");
      }
      break;
  }
}

}  // namespace

std::vector<std::size_t> stratified_sample_order(const Dataset& ds, std::uint64_t seed) {
  SeededRng rng(seed);
  std::array<std::vector<std::size_t>, kNumMentalStates> groups;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    groups[static_cast<std::size_t>(ordinal(ds.records[i].label) - 1)].push_back(i);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    SeededRng group_rng = rng.derive(g);
    group_rng.shuffle(groups[g]);
  }
  std::vector<std::size_t> order;
  order.reserve(ds.records.size());
  std::array<std::size_t, kNumMentalStates> cursor{};
  while (order.size() < ds.records.size()) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (cursor[g] < groups[g].size()) order.push_back(groups[g][cursor[g]++]);
    }
  }
  return order;
}

RunReport run_with_backend(const RunConfig& config, const Dataset& ds, Backend& backend,
                           const PromptLibrary& prompts) {
  validate_config(config);
  if (ds.records.empty()) throw DataError("dataset '" + ds.name + "' has no records");

  std::vector<std::size_t> order = stratified_sample_order(ds, config.seed);
  if (order.size() > config.sample_limit) order.resize(config.sample_limit);

  const TrainingContext context = make_training_context(ds);

  RunReport report;
  report.dataset_name = ds.name;
  report.backend_id = backend.id();
  for (std::size_t idx : order) report.record_ids.push_back(ds.records[idx].record_id);

  for (StrategyKind strategy : config.strategies) {
    struct PerRecord {
      SampleOutcome sample;
      std::string trace_line;
      json forest;
      std::size_t calls = 0;
    };
    std::vector<PerRecord> slots(order.size());

    parallel_for(order.size(), config.jobs, [&](std::size_t i) {
      const SurveyRecord& record = ds.records[order[i]];
      StrategyOutcome outcome =
          run_strategy(strategy, record, backend, prompts, config.params, config.seed, &context);

      PerRecord& slot = slots[i];
      slot.calls = outcome.backend_calls;
      slot.sample.truth = ordinal(record.label);
      slot.sample.pred = outcome.label ? ordinal(*outcome.label) : 0;
      slot.sample.runtime_s = outcome.backend_latency_s;
      double consistency_sum = 0.0;
      for (double c : outcome.consistencies) consistency_sum += c;
      slot.sample.consistency =
          outcome.consistencies.empty()
              ? 1.0
              : consistency_sum / static_cast<double>(outcome.consistencies.size());

      if (strategy == StrategyKind::kRfot && outcome.trace.contains("forest")) {
        slot.forest = outcome.trace["forest"];
      }
      json line;
      line["record_id"] = record.record_id;
      line["strategy"] = std::string(strategy_name(strategy));
      line["truth"] = slot.sample.truth;
      line["pred"] = slot.sample.pred;
      line["runtime_s"] = slot.sample.runtime_s;
      line["consistency"] = slot.sample.consistency;
      line["calls"] = outcome.backend_calls;
      line["trace"] = std::move(outcome.trace);
      slot.trace_line = line.dump();
    });

    StrategyReportRow row;
    row.strategy = strategy;
    std::vector<SampleOutcome> samples;
    std::vector<double> consistencies;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      PerRecord& slot = slots[i];
      samples.push_back(slot.sample);
      consistencies.push_back(slot.sample.consistency);
      row.preds.push_back(slot.sample.pred);
      row.truths.push_back(slot.sample.truth);
      row.backend_calls += slot.calls;
      report.trace_lines.push_back(std::move(slot.trace_line));
      if (strategy == StrategyKind::kRfot && !slot.forest.is_null()) {
        report.forest_dumps.emplace_back(ds.records[order[i]].record_id, std::move(slot.forest));
      }
    }
    row.eval = evaluate(samples);
    row.consistency_pass90_pct = pass_rate(consistencies, 0.9);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string render_results_csv(const RunReport& report) {
  std::string out =
      "dataset,backend,strategy,samples,success_pct,weighted_f1_pct,runtime_s,"
      "consistency_pct,consistency_pass90_pct\n";
  for (const auto& row : report.rows) {
    out += report.dataset_name + "," + report.backend_id + "," +
           std::string(strategy_name(row.strategy)) + "," + std::to_string(row.eval.n_samples) +
           "," + format_fixed(row.eval.success_pct, 2) + "," +
           format_fixed(row.eval.weighted_f1_pct, 2) + "," +
           format_fixed(row.eval.mean_runtime_s, 2) + "," +
           format_fixed(row.eval.consistency_pct, 2) + "," +
           format_fixed(row.consistency_pass90_pct, 2) + "\n";
  }
  return out;
}

std::string render_results_table(const RunReport& report) {
  auto pad = [](std::string s, std::size_t width) {
    while (s.size() < width) s.push_back(' ');
    s += "  ";  // column gap survives oversized cells
    return s;
  };
  auto num = [&pad](double v, std::size_t width) { return pad(format_fixed(v, 2), width); };

  std::ostringstream out;
  out << pad("Dataset", 18) << pad("Backend", 20) << pad("Prompting", 12)
      << pad("Success (%)", 12) << pad("Weighted-F1 (%)", 16) << pad("Runtime (s)", 12)
      << "Consistency (%)\n";
  out << std::string(110, '-') << "\n";
  std::set<StrategyKind> present;
  for (const auto& row : report.rows) {
    present.insert(row.strategy);
    out << pad(report.dataset_name, 18) << pad(report.backend_id, 20)
        << pad(std::string(strategy_display_name(row.strategy)), 12)
        << num(row.eval.success_pct, 12) << num(row.eval.weighted_f1_pct, 16)
        << num(row.eval.mean_runtime_s, 12) << format_fixed(row.eval.consistency_pct, 2) << "\n";
  }
  if (present.size() == 5) {
    out << pad(report.dataset_name, 18) << pad(report.backend_id, 20) << pad("Fine Tuning", 12)
        << pad("-", 12) << pad("-", 16) << pad("-", 12) << "- (not implemented)\n";
  }
  out << "\n";
  out << "consistency pass-rate @0.9:";
  for (const auto& row : report.rows) {
    out << " " << strategy_name(row.strategy) << "="
        << format_fixed(row.consistency_pass90_pct, 2) << "%";
  }
  out << "\n";
  return out.str();
}

RunReport run(const RunConfig& config) {
  validate_config(config);
  Dataset ds = load_dataset(config.dataset_path, config.format);
  PromptLibrary prompts = config.prompts_dir.empty()
                              ? PromptLibrary::builtin()
                              : PromptLibrary::from_directory(config.prompts_dir);

  Cassette cassette;
  std::unique_ptr<HttpBackend> live;
  std::unique_ptr<Backend> owned;
  RecordingBackend* recorder = nullptr;

  switch (config.backend.mode) {
    case BackendMode::kReplay: {
      if (!std::filesystem::exists(config.backend.cassette_path)) {
        throw ConfigError("cassette file does not exist: " + config.backend.cassette_path);
      }
      cassette.load_file(config.backend.cassette_path);
      owned = std::make_unique<ReplayBackend>(cassette);
      break;
    }
    case BackendMode::kLive: {
      HttpBackendConfig http;
      http.base_url = config.backend.url;
      http.model = config.backend.model;
      http.api_key = config.backend.api_key;
      http.timeout_s = config.backend.timeout_s;
      owned = std::make_unique<HttpBackend>(std::move(http));
      break;
    }
    case BackendMode::kRecord: {
      if (std::filesystem::exists(config.backend.cassette_path)) {
        cassette.load_file(config.backend.cassette_path);  // resume a partial recording
      }
      HttpBackendConfig http;
      http.base_url = config.backend.url;
      http.model = config.backend.model;
      http.api_key = config.backend.api_key;
      http.timeout_s = config.backend.timeout_s;
      live = std::make_unique<HttpBackend>(std::move(http));
      auto recording = std::make_unique<RecordingBackend>(*live, cassette);
      recorder = recording.get();
      owned = std::move(recording);
      break;
    }
  }

  RunReport report;
  try {
    report = run_with_backend(config, ds, *owned, prompts);
  } catch (const Error&) {
    if (config.backend.mode == BackendMode::kRecord) {
      cassette.save_file(config.backend.cassette_path);
      json marker;
      marker["resume"] = true;
      marker["failed_fingerprint"] = recorder ? recorder->last_failed_fingerprint() : "";
      write_text_file(resume_marker_path(config.backend.cassette_path), marker.dump() + "\n");
    }
    throw;
  }

  if (config.backend.mode == BackendMode::kRecord) {
    cassette.save_file(config.backend.cassette_path);
    std::error_code ec;
    std::filesystem::remove(resume_marker_path(config.backend.cassette_path), ec);
  }

  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "results.csv", render_results_csv(report));
  write_text_file(out_dir / "results.txt", render_results_table(report));
  std::string traces;
  for (const auto& line : report.trace_lines) {
    traces += line;
    traces += '\n';
  }
  write_text_file(out_dir / "traces.jsonl", traces);
  if (config.write_forests && !report.forest_dumps.empty()) {
    const std::filesystem::path forests = out_dir / "forests";
    std::filesystem::create_directories(forests);
    for (const auto& [record_id, forest] : report.forest_dumps) {
      std::string safe = record_id;
      for (char& c : safe) {
        if (c == '/' || c == '\\') c = '_';
      }
      write_text_file(forests / (safe + ".json"), forest.dump(2) + "\n");
    }
  }
  return report;
}

}  // namespace rfot
