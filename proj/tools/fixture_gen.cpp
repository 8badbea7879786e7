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

// Regenerates the shipped synthetic fixture: the 10-record dataset and the
// cassette covering every replay scenario the test suite runs. Each scenario
// is recorded from fresh cursors so it can later be replayed in isolation.
//
// Usage: rfot_fixture_gen [data_dir]   (default: data)

#include <filesystem>
#include <iostream>

#include "rfot/llm.hpp"
#include "rfot/runner.hpp"
#include "rfot/synthetic.hpp"

int main(int argc, char** argv) {
  const std::string data_dir = argc > 1 ? argv[1] : "data";
  try {
    std::filesystem::create_directories(data_dir);

    const rfot::Dataset dataset = rfot::make_synthetic_dataset(rfot::kFixtureSamples);
    const auto dataset_path =
        std::filesystem::path(data_dir) / rfot::kFixtureDatasetFile;
    rfot::save_dataset(dataset, dataset_path, rfot::DatasetFormat::kJsonl);
    std::cout << "wrote " << dataset_path.string() << " (" << dataset.records.size()
              << " records, " << dataset.turns_per_record << " turns)\n";

    rfot::Cassette cassette;
    rfot::SurveyRuleBackend model;
    rfot::RecordingBackend recorder(model, cassette);
    const rfot::PromptLibrary prompts = rfot::PromptLibrary::builtin();

    for (const auto& scenario : rfot::fixture_scenarios()) {
      cassette.reset_cursors();  // each scenario replays from the top
      rfot::RunConfig config = rfot::fixture_run_config(scenario, data_dir, "unused");
      rfot::RunReport report = rfot::run_with_backend(config, dataset, recorder, prompts);
      std::cout << "recorded scenario '" << scenario.name << "': " << report.rows.size()
                << " strategies, cassette now " << cassette.entry_count() << " entries / "
                << cassette.fingerprint_count() << " fingerprints\n";
    }

    const auto cassette_path =
        std::filesystem::path(data_dir) / rfot::kFixtureCassetteFile;
    cassette.save_file(cassette_path);
    std::cout << "wrote " << cassette_path.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "fixture generation failed: " << e.what() << "\n";
    return 1;
  }
}
