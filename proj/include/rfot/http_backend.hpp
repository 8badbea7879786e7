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

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rfot/llm.hpp"

namespace rfot {

struct HttpBackendConfig {
  std::string base_url;  // e.g. http://localhost:11434/v1
  std::string model;
  std::string api_key;      // optional; sent as a Bearer token when set
  double timeout_s = 60.0;
  int max_retries = 3;       // transport errors only
  int backoff_base_ms = 1000;  // doubles per retry
};

struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string base_path;  // no trailing slash
};

ParsedUrl parse_http_url(const std::string& url);  // throws ConfigError

/// Appends /chat/completions unless the URL already points at it.
std::string resolve_chat_endpoint(const std::string& base_path);

/// Pulls the completion text out of a chat response. Understands the
/// OpenAI choices[].message.content shape and the bare message.content
/// variant some local runners return.
std::optional<std::string> extract_chat_content(const nlohmann::json& body);

/// Live backend speaking the OpenAI-compatible chat completions protocol, as
/// served by local model runners. Stateless per request; safe to call from
/// multiple workers.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  Completion complete(const PromptRequest& req) override;
  std::string id() const override { return "http:" + config_.model; }

 private:
  HttpBackendConfig config_;
  ParsedUrl url_;
  std::string endpoint_;
};

}  // namespace rfot
