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

#ifndef EVOCTL_TASK_SPEC_HPP_
#define EVOCTL_TASK_SPEC_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evoctl/envs.hpp"

namespace evoctl::spec {

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A validated synthesis task: what to control, for how long, and the
// starter policy the first prompts are built from. Immutable after load.
struct TaskSpec {
  std::string task_description;
  std::string starter_policy_source;
  env::EnvId env_id = env::EnvId::kPendulumSwingup;
  int horizon = 1000;
  int obs_dim = 0;
  int action_dim = 0;
};

enum class GeneratorKind { kMock, kRemote };

struct RunConfig {
  int islands = 10;
  int candidates_per_prompt = 4;
  int max_candidates = 10000;
  int reset_period = 2000;          // registrations between island resets
  uint64_t seed = 0;
  GeneratorKind generator = GeneratorKind::kMock;
  int db_capacity_per_island = 100;
  double tau_db = 1.0;              // within-island softmax temperature
  int eval_episodes = 1;
  std::optional<uint64_t> eval_seed;
  int checkpoint_every = 1000;      // candidates between checkpoints
  int workers = 1;
  std::optional<double> target_score;
  // Remote generator parameters ([run] keys / flags; api key via env var).
  double temperature = 1.0;
  double top_p = 0.95;
  int repeat_last_n = 15;
  int max_tokens = 512;
  std::string endpoint;
  std::string model_id;
};

// Parses the task specification file: sections [task] (description),
// [env] (id, horizon), [starter] (fenced policy source). The starter must
// parse and run on a zero observation; absent starter defaults to the
// zero-action policy. Throws SpecError / ParseError.
TaskSpec LoadSpec(const std::string& path);

// Same, from text already in memory (path only for messages).
TaskSpec LoadSpecFromText(const std::string& text, const std::string& path = "<memory>");

// Reads RunConfig keys from the [run] section of `path` (file optional:
// empty path means defaults only), then applies key=value overrides.
// Precedence: overrides > file > defaults.
RunConfig LoadRunConfig(const std::string& path,
                        const std::vector<std::pair<std::string, std::string>>& overrides);

std::string DefaultStarterSource(env::EnvId env_id);

uint64_t RunConfigHash(const RunConfig& cfg, const TaskSpec& spec);

}  // namespace evoctl::spec

#endif  // EVOCTL_TASK_SPEC_HPP_
