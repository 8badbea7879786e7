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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rfot {

/// One completion request. seed_hint is advisory for live backends and never
/// affects cassette identity.
struct PromptRequest {
  std::string system;
  std::string user;
  double temperature = 0.7;
  int max_tokens = 256;
  std::optional<std::int64_t> seed_hint;
};

struct Completion {
  std::string text;
  double latency_s = 0.0;
  std::string backend_id;
};

/// Stable identity of a request for recording/replay. Only system, user and
/// temperature participate, so cassettes survive max_tokens or seed tuning.
std::string fingerprint(const PromptRequest& req);

nlohmann::json request_to_json(const PromptRequest& req);
PromptRequest request_from_json(const nlohmann::json& j);

/// The completion contract every backend implements.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion complete(const PromptRequest& req) = 0;
  virtual std::string id() const = 0;
};

/// Recorded completions keyed by request fingerprint, with a replay cursor
/// per fingerprint. Safe for concurrent use; replays of distinct fingerprints
/// never interleave, same-fingerprint concurrent order is unspecified.
///
/// File format: a flat JSON map {fingerprint: [texts...]}. Recorded latencies
/// go to a "<file>.latencies.json" sidecar so the cassette itself stays plain.
class Cassette {
 public:
  Cassette() = default;
  Cassette(const Cassette&) = delete;
  Cassette& operator=(const Cassette&) = delete;

  void load_file(const std::filesystem::path& path);
  void save_file(const std::filesystem::path& path) const;

  void add(const std::string& fp, std::string text, double latency_s = 0.0);
  void add(const PromptRequest& req, std::string text, double latency_s = 0.0);

  struct Replayed {
    std::string text;
    double latency_s = 0.0;
  };

  /// Next unconsumed completion for the fingerprint, advancing its cursor.
  std::optional<Replayed> try_consume(const std::string& fp);

  /// Appends a fresh completion and marks it consumed, so a later identical
  /// request in the same run records again instead of replaying it.
  void append_consumed(const std::string& fp, std::string text, double latency_s);

  void reset_cursors();

  bool contains(const std::string& fp) const;
  std::size_t fingerprint_count() const;
  std::size_t entry_count() const;
  std::vector<std::string> fingerprints() const;

 private:
  std::map<std::string, std::vector<std::string>> texts_;
  std::map<std::string, std::vector<double>> latencies_;
  std::map<std::string, std::size_t> cursors_;
  mutable std::mutex mu_;
};

/// Deterministic playback of a cassette. Unknown or exhausted fingerprints
/// raise CassetteMissError naming the fingerprint.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(Cassette& cassette) : cassette_(cassette) {}
  Completion complete(const PromptRequest& req) override;
  std::string id() const override { return "replay"; }

 private:
  Cassette& cassette_;
};

/// In-memory scripted backend for tests: seed it with request/reply pairs and
/// it behaves exactly like cassette replay.
class ScriptedBackend : public Backend {
 public:
  void script(const PromptRequest& req, std::string text, double latency_s = 0.0);
  Completion complete(const PromptRequest& req) override;
  std::string id() const override { return "scripted"; }
  void reset_cursors() { cassette_.reset_cursors(); }

 private:
  Cassette cassette_;
};

/// Backend computed by a plain function. Handy for rule-driven fakes.
class FunctionBackend : public Backend {
 public:
  using Fn = std::function<std::string(const PromptRequest&)>;
  explicit FunctionBackend(Fn fn, std::string id = "function")
      : fn_(std::move(fn)), id_(std::move(id)) {}
  Completion complete(const PromptRequest& req) override {
    return Completion{fn_(req), 0.0, id_};
  }
  std::string id() const override { return id_; }

 private:
  Fn fn_;
  std::string id_;
};

/// Decorator that counts calls and accumulates reported latency.
class TrackingBackend : public Backend {
 public:
  explicit TrackingBackend(Backend& inner) : inner_(inner) {}
  Completion complete(const PromptRequest& req) override;
  std::string id() const override { return inner_.id(); }
  std::size_t calls() const { return calls_.load(); }
  double total_latency_s() const;

 private:
  Backend& inner_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  double latency_sum_ = 0.0;
};

/// Record/replay hybrid: requests already in the cassette are replayed
/// (resuming a partial recording skips them), everything else goes to the
/// live backend and is appended. The caller persists the cassette.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(Backend& live, Cassette& cassette) : live_(live), cassette_(cassette) {}
  Completion complete(const PromptRequest& req) override;
  std::string id() const override { return live_.id(); }

  /// Fingerprint of the most recent live call that failed, for resume markers.
  std::string last_failed_fingerprint() const;

 private:
  Backend& live_;
  Cassette& cassette_;
  mutable std::mutex mu_;
  std::string last_failed_fp_;
};

}  // namespace rfot
