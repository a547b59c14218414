// Copyright 2026 The evoctl Authors.
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

#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "evoctl/generation.hpp"

namespace evoctl::gen {
namespace {

using nlohmann::json;

struct ParsedEndpoint {
  std::string host_port;  // scheme://host[:port]
  std::string path;       // /v1/completions
};

ParsedEndpoint SplitEndpoint(const std::string& endpoint) {
  ParsedEndpoint out;
  const size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw TransportError("endpoint must include a scheme: " + endpoint);
  }
  const size_t path = endpoint.find('/', scheme + 3);
  if (path == std::string::npos) {
    out.host_port = endpoint;
    out.path = "/";
  } else {
    out.host_port = endpoint.substr(0, path);
    out.path = endpoint.substr(path);
  }
  return out;
}

}  // namespace

CandidateBatch GenerateRemote(const Prompt& prompt, const GeneratorParams& params, int n) {
  if (params.endpoint.empty()) {
    throw TransportError("remote generator endpoint is not configured");
  }
  const ParsedEndpoint ep = SplitEndpoint(params.endpoint);

  json request = {
      {"model", params.model_id},
      {"prompt", prompt.text},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"repeat_penalty_window", params.repeat_last_n},
      {"max_tokens", params.max_tokens},
      {"n", n},
  };
  const std::string body = request.dump();

  httplib::Client client(ep.host_port);
  client.set_connection_timeout(params.connect_timeout_s, 0);
  client.set_read_timeout(params.read_timeout_s, 0);
  httplib::Headers headers;
  if (!params.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + params.api_key);
  }

  std::string last_error;
  httplib::Result result;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(250 << attempt));
    }
    result = client.Post(ep.path, headers, body, "application/json");
    if (!result) {
      last_error = "transport: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status == 401 || result->status == 403) {
      throw TransportError("authentication failed (HTTP " + std::to_string(result->status) +
                           ")");
    }
    if (result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    break;
  }
  if (!result) {
    throw TransportError("completion request failed after retries; last error: " + last_error);
  }
  if (result->status != 200) {
    throw TransportError("completion request failed: HTTP " + std::to_string(result->status));
  }

  json reply;
  try {
    reply = json::parse(result->body);
  } catch (const json::parse_error& e) {
    throw TransportError(std::string("malformed completion response: ") + e.what());
  }
  if (!reply.contains("choices") || !reply["choices"].is_array()) {
    throw TransportError("malformed completion response: missing choices array");
  }

  CandidateBatch batch;
  batch.generator_id = "remote:" + params.model_id;
  for (const auto& choice : reply["choices"]) {
    std::string text;
    if (choice.contains("text") && choice["text"].is_string()) {
      text = choice["text"].get<std::string>();
    } else {
      ++batch.extraction_failures;
      continue;
    }
    // Completions return the continuation; the requested header lives in
    // the prompt, so stitch them back together before extracting.
    std::string full = text;
    if (text.find("def ") == std::string::npos) {
      const size_t header = prompt.text.rfind("def policy_v2");
      if (header != std::string::npos) full = prompt.text.substr(header) + text;
    }
    auto extracted = ExtractPolicy(full);
    if (extracted) {
      batch.sources.push_back(std::move(*extracted));
    } else {
      ++batch.extraction_failures;
    }
  }
  return batch;
}

}  // namespace evoctl::gen
