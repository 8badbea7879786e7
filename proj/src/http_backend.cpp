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

#include "rfot/http_backend.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "rfot/errors.hpp"
#include "rfot/util.hpp"

namespace rfot {

using nlohmann::json;

ParsedUrl parse_http_url(const std::string& url) {
  std::string rest = url;
  if (starts_with(rest, "http://")) {
    rest = rest.substr(7);
  } else if (starts_with(rest, "https://")) {
    throw ConfigError("https backends are not supported by this build; use http");
  } else if (contains(rest, "://")) {
    throw ConfigError("unsupported URL scheme in '" + url + "'");
  }
  ParsedUrl out;
  const std::size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  out.base_path = slash == std::string::npos ? "" : rest.substr(slash);
  while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();

  const std::size_t colon = authority.find(':');
  if (colon == std::string::npos) {
    out.host = authority;
  } else {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("invalid port in URL '" + url + "'");
    }
  }
  if (out.host.empty()) throw ConfigError("missing host in URL '" + url + "'");
  return out;
}

std::string resolve_chat_endpoint(const std::string& base_path) {
  const std::string suffix = "/chat/completions";
  if (base_path.size() >= suffix.size() &&
      base_path.compare(base_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return base_path;
  }
  return base_path + suffix;
}

std::optional<std::string> extract_chat_content(const json& body) {
  if (body.contains("choices") && body["choices"].is_array() && !body["choices"].empty()) {
    const auto& first = body["choices"][0];
    if (first.contains("message") && first["message"].contains("content") &&
        first["message"]["content"].is_string()) {
      return first["message"]["content"].get<std::string>();
    }
    if (first.contains("text") && first["text"].is_string()) {
      return first["text"].get<std::string>();
    }
  }
  if (body.contains("message") && body["message"].contains("content") &&
      body["message"]["content"].is_string()) {
    return body["message"]["content"].get<std::string>();
  }
  return std::nullopt;
}

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)),
      url_(parse_http_url(config_.base_url)),
      endpoint_(resolve_chat_endpoint(url_.base_path)) {
  if (config_.model.empty()) throw ConfigError("http backend needs a model name");
}

Completion HttpBackend::complete(const PromptRequest& req) {
  json body;
  body["model"] = config_.model;
  json messages = json::array();
  if (!req.system.empty()) {
    messages.push_back({{"role", "system"}, {"content", req.system}});
  }
  messages.push_back({{"role", "user"}, {"content", req.user}});
  body["messages"] = std::move(messages);
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;
  body["stream"] = false;
  if (req.seed_hint) body["seed"] = *req.seed_hint;

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  const std::string payload = body.dump();

  std::string last_transport_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long>(config_.backoff_base_ms) << (attempt - 1)));
    }
    // httplib clients are not thread safe; one per call keeps the backend
    // stateless per request.
    httplib::Client client(url_.host, url_.port);
    const auto timeout = std::chrono::duration<double>(config_.timeout_s);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const auto start = std::chrono::steady_clock::now();
    httplib::Result result = client.Post(endpoint_, headers, payload, "application/json");
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    if (!result) {
      last_transport_error = httplib::to_string(result.error());
      continue;  // transport errors are the only retriable kind
    }
    if (result->status < 200 || result->status >= 300) {
      throw BackendError("chat completion request failed", result->status);
    }
    json parsed;
    try {
      parsed = json::parse(result->body);
    } catch (const json::exception& e) {
      throw BackendError(std::string("backend returned invalid JSON: ") + e.what());
    }
    auto content = extract_chat_content(parsed);
    if (!content || content->empty()) {
      throw BackendError("backend response carries no completion text");
    }
    return Completion{std::move(*content), elapsed.count(), id()};
  }
  throw TransportError("chat completion unreachable after " +
                       std::to_string(config_.max_retries + 1) + " attempts: " +
                       last_transport_error);
}

}  // namespace rfot
