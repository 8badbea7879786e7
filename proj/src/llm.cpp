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

#include "rfot/llm.hpp"

#include <fstream>
#include <sstream>

#include "rfot/errors.hpp"
#include "rfot/util.hpp"

namespace rfot {

using nlohmann::json;

std::string fingerprint(const PromptRequest& req) {
  // Length-prefixed canonical form; max_tokens and seed_hint are excluded on
  // purpose so cassettes survive decoding-parameter tuning.
  std::string canonical;
  canonical.reserve(req.system.size() + req.user.size() + 32);
  canonical += "s:" + std::to_string(req.system.size()) + ":";
  canonical += req.system;
  canonical += "u:" + std::to_string(req.user.size()) + ":";
  canonical += req.user;
  canonical += "t:" + format_fixed(req.temperature, 4);
  return to_hex(fnv1a64(canonical));
}

json request_to_json(const PromptRequest& req) {
  json j;
  j["system"] = req.system;
  j["user"] = req.user;
  j["temperature"] = req.temperature;
  j["max_tokens"] = req.max_tokens;
  if (req.seed_hint) j["seed_hint"] = *req.seed_hint;
  return j;
}

PromptRequest request_from_json(const json& j) {
  PromptRequest req;
  req.system = j.value("system", std::string());
  req.user = j.at("user").get<std::string>();
  req.temperature = j.value("temperature", 0.7);
  req.max_tokens = j.value("max_tokens", 256);
  if (j.contains("seed_hint") && !j["seed_hint"].is_null()) {
    req.seed_hint = j["seed_hint"].get<std::int64_t>();
  }
  return req;
}

void Cassette::load_file(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError("cassette file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError("cassette file " + path.string() + " is not a JSON map");

  std::map<std::string, std::vector<double>> latencies;
  const auto sidecar = std::filesystem::path(path.string() + ".latencies.json");
  if (std::filesystem::exists(sidecar)) {
    try {
      json lj = json::parse(read_text_file(sidecar));
      for (auto it = lj.begin(); it != lj.end(); ++it) {
        latencies[it.key()] = it.value().get<std::vector<double>>();
      }
    } catch (const json::exception& e) {
      throw DataError("latency sidecar " + sidecar.string() + " is malformed: " + e.what());
    }
  }

  std::lock_guard<std::mutex> lock(mu_);
  texts_.clear();
  latencies_.clear();
  cursors_.clear();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_array()) {
      throw DataError("cassette entry for " + it.key() + " is not an array");
    }
    auto texts = it.value().get<std::vector<std::string>>();
    auto lat_it = latencies.find(it.key());
    std::vector<double> lats =
        lat_it != latencies.end() ? lat_it->second : std::vector<double>(texts.size(), 0.0);
    lats.resize(texts.size(), 0.0);
    texts_[it.key()] = std::move(texts);
    latencies_[it.key()] = std::move(lats);
  }
}

void Cassette::save_file(const std::filesystem::path& path) const {
  json j = json::object();
  json lat = json::object();
  bool any_latency = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [fp, texts] : texts_) {
      j[fp] = texts;
      auto it = latencies_.find(fp);
      if (it != latencies_.end()) {
        lat[fp] = it->second;
        for (double v : it->second) {
          if (v != 0.0) any_latency = true;
        }
      }
    }
  }
  write_text_file(path, j.dump() + "\n");
  if (any_latency) {
    write_text_file(std::filesystem::path(path.string() + ".latencies.json"), lat.dump() + "\n");
  }
}

void Cassette::add(const std::string& fp, std::string text, double latency_s) {
  std::lock_guard<std::mutex> lock(mu_);
  texts_[fp].push_back(std::move(text));
  latencies_[fp].push_back(latency_s);
}

void Cassette::add(const PromptRequest& req, std::string text, double latency_s) {
  add(fingerprint(req), std::move(text), latency_s);
}

std::optional<Cassette::Replayed> Cassette::try_consume(const std::string& fp) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = texts_.find(fp);
  if (it == texts_.end()) return std::nullopt;
  std::size_t& cursor = cursors_[fp];
  if (cursor >= it->second.size()) return std::nullopt;
  Replayed out;
  out.text = it->second[cursor];
  const auto& lats = latencies_[fp];
  out.latency_s = cursor < lats.size() ? lats[cursor] : 0.0;
  ++cursor;
  return out;
}

void Cassette::append_consumed(const std::string& fp, std::string text, double latency_s) {
  std::lock_guard<std::mutex> lock(mu_);
  auto& texts = texts_[fp];
  texts.push_back(std::move(text));
  latencies_[fp].push_back(latency_s);
  cursors_[fp] = texts.size();
}

void Cassette::reset_cursors() {
  std::lock_guard<std::mutex> lock(mu_);
  cursors_.clear();
}

bool Cassette::contains(const std::string& fp) const {
  std::lock_guard<std::mutex> lock(mu_);
  return texts_.count(fp) > 0;
}

std::size_t Cassette::fingerprint_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return texts_.size();
}

std::size_t Cassette::entry_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t n = 0;
  for (const auto& [fp, texts] : texts_) n += texts.size();
  return n;
}

std::vector<std::string> Cassette::fingerprints() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> out;
  out.reserve(texts_.size());
  for (const auto& [fp, texts] : texts_) out.push_back(fp);
  return out;
}

Completion ReplayBackend::complete(const PromptRequest& req) {
  const std::string fp = fingerprint(req);
  auto replayed = cassette_.try_consume(fp);
  if (!replayed) throw CassetteMissError(fp);
  return Completion{std::move(replayed->text), replayed->latency_s, id()};
}

void ScriptedBackend::script(const PromptRequest& req, std::string text, double latency_s) {
  cassette_.add(req, std::move(text), latency_s);
}

Completion ScriptedBackend::complete(const PromptRequest& req) {
  const std::string fp = fingerprint(req);
  auto replayed = cassette_.try_consume(fp);
  if (!replayed) throw CassetteMissError(fp);
  return Completion{std::move(replayed->text), replayed->latency_s, id()};
}

Completion TrackingBackend::complete(const PromptRequest& req) {
  Completion c = inner_.complete(req);
  calls_.fetch_add(1);
  {
    std::lock_guard<std::mutex> lock(mu_);
    latency_sum_ += c.latency_s;
  }
  return c;
}

double TrackingBackend::total_latency_s() const {
  std::lock_guard<std::mutex> lock(mu_);
  return latency_sum_;
}

Completion RecordingBackend::complete(const PromptRequest& req) {
  const std::string fp = fingerprint(req);
  if (auto replayed = cassette_.try_consume(fp)) {
    return Completion{std::move(replayed->text), replayed->latency_s, id()};
  }
  Completion c;
  try {
    c = live_.complete(req);
  } catch (const TransportError&) {
    std::lock_guard<std::mutex> lock(mu_);
    last_failed_fp_ = fp;
    throw;
  } catch (const BackendError&) {
    std::lock_guard<std::mutex> lock(mu_);
    last_failed_fp_ = fp;
    throw;
  }
  cassette_.append_consumed(fp, c.text, c.latency_s);
  return c;
}

std::string RecordingBackend::last_failed_fingerprint() const {
  std::lock_guard<std::mutex> lock(mu_);
  return last_failed_fp_;
}

}  // namespace rfot
