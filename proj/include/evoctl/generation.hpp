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

#ifndef EVOCTL_GENERATION_HPP_
#define EVOCTL_GENERATION_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evoctl/policy_ast.hpp"
#include "evoctl/rng.hpp"

namespace evoctl::gen {

struct Prompt {
  std::string text;
  std::string low_source;   // lineage: parent pasted as policy_v0
  std::string high_source;  // lineage: parent pasted as policy_v1
  int version_count = 2;    // bodies v0..v(k-1) shown, v_k requested
};

// Builds the prompt: module docstring (task description + improvement
// instruction), import line, the two parents renamed policy_v0/policy_v1
// (v1 is the higher-scoring one), and the bare header of policy_v2 with the
// docstring "Improved version of 'policy_v1'.".
Prompt BuildPrompt(const policy::PolicyProgram& low, const policy::PolicyProgram& high,
                   const std::string& task_description);

// Pulls the first plausible policy function out of raw LLM text: markdown
// fences and surrounding prose are stripped, the function is renamed to the
// canonical `policy`, its body dedented to column zero. Prefers a function
// named `request_name`, then any name starting with "policy". Returns
// nullopt when no function body is found.
std::optional<std::string> ExtractPolicy(const std::string& llm_text,
                                         const std::string& request_name = "policy_v2");

struct CandidateBatch {
  std::vector<std::string> sources;
  std::string generator_id;
  int extraction_failures = 0;
};

// Deterministic mutation/crossover engine standing in for the LLM at desk
// scale. Every output parses by construction (verified by re-parse).
// Edit classes: numeric literal perturbation, comparison flip, branch
// threshold nudge, subtree graft from `low`, clip wrap, observation
// injection.
CandidateBatch GenerateMock(const policy::PolicyProgram& low,
                            const policy::PolicyProgram& high, Rng& rng, int n);

struct GeneratorParams {
  double temperature = 1.0;
  double top_p = 0.95;
  int repeat_last_n = 15;
  int max_tokens = 512;
  std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/completions
  std::string model_id;
  std::string api_key;   // from the environment, never from files
  int n = 4;             // completions per request batch
  int connect_timeout_s = 10;
  int read_timeout_s = 120;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Issues n completion requests against a completions-style HTTP endpoint,
// forwarding temperature/top_p/repeat window, and extracts a policy from
// each reply. Extraction failures are dropped and counted. Transport
// failures retry with exponential backoff (3 attempts) and then throw
// TransportError. The model is stateless across calls.
CandidateBatch GenerateRemote(const Prompt& prompt, const GeneratorParams& params, int n);

}  // namespace evoctl::gen

#endif  // EVOCTL_GENERATION_HPP_
