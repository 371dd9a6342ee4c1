// Copyright 2026 The SecPE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SECPE_HTTP_GENERATOR_HPP
#define SECPE_HTTP_GENERATOR_HPP

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "secpe/errors.hpp"

namespace secpe {

// Text generator over a chat-completions endpoint
// (POST {base_url}/v1/chat/completions, bearer token from SECPE_API_KEY).
// Transient failures (connect errors, 429 and 5xx) are retried with
// exponential backoff.

struct HttpGeneratorConfig {
  std::string base_url;  // e.g. http://localhost:8080
  std::string model;
  double temperature = 1.2;
  int max_tokens = 448;
  std::string api_key_env = "SECPE_API_KEY";
  int timeout_seconds = 120;
  int max_retries = 3;
  int backoff_initial_ms = 1000;  // doubles per retry
  // prompt templates; "{SAMPLE}" in the variation prompt is replaced with
  // the survivor text
  std::string random_prompt = "Write one short sample document.";
  std::string variation_prompt =
      "Rewrite the following document, keeping its topic and style:\n"
      "{SAMPLE}";
};

class HttpGenerator {
 public:
  using Item = std::string;

  explicit HttpGenerator(HttpGeneratorConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty())
      throw ValidationError("HttpGenerator: base_url is required");
  }

  std::vector<Item> random_samples(std::size_t count,
                                   std::uint64_t /*seed*/) const {
    std::vector<Item> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(complete(cfg_.random_prompt));
    return out;
  }

  std::vector<Item> variations(const Item& sample, std::size_t l,
                               std::size_t /*round*/,
                               std::uint64_t /*seed*/) const {
    std::string prompt = cfg_.variation_prompt;
    std::size_t pos = prompt.find("{SAMPLE}");
    if (pos != std::string::npos) prompt.replace(pos, 8, sample);
    std::vector<Item> out;
    out.reserve(l);
    for (std::size_t i = 0; i < l; ++i) out.push_back(complete(prompt));
    return out;
  }

  const HttpGeneratorConfig& config() const { return cfg_; }

 private:
  std::string complete(const std::string& prompt) const {
    nlohmann::json body;
    body["model"] = cfg_.model;
    body["messages"] = nlohmann::json::array(
        {nlohmann::json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = cfg_.temperature;
    body["max_tokens"] = cfg_.max_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()))
      headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    int backoff_ms = cfg_.backoff_initial_ms;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
      }
      httplib::Client client(cfg_.base_url);
      client.set_connection_timeout(cfg_.timeout_seconds, 0);
      client.set_read_timeout(cfg_.timeout_seconds, 0);
      client.set_write_timeout(cfg_.timeout_seconds, 0);
      auto res = client.Post("/v1/chat/completions", headers, payload,
                             "application/json");
      if (!res) {
        last_error = "connection failed (" +
                     httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw BackendError("chat completion rejected: HTTP " +
                           std::to_string(res->status) + " " + res->body);
      try {
        nlohmann::json doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content")
            .get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("chat completion response malformed: ") +
                           e.what());
      }
    }
    throw BackendError("chat completion failed after " +
                       std::to_string(cfg_.max_retries + 1) +
                       " attempts: " + last_error);
  }

  HttpGeneratorConfig cfg_;
};

}  // namespace secpe

#endif  // SECPE_HTTP_GENERATOR_HPP
