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

#ifndef EVOCTL_EVALUATION_HPP_
#define EVOCTL_EVALUATION_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "evoctl/envs.hpp"
#include "evoctl/policy_lang.hpp"

namespace evoctl::eval {

struct StepRecord {
  int t = 0;
  std::vector<double> state;
  std::vector<double> obs;
  std::vector<double> action;
  double reward = 0.0;
  double cumulative = 0.0;
};

struct RolloutResult {
  double return_R = 0.0;
  int steps_completed = 0;
  bool valid = true;
  bool terminated_early = false;
  std::string termination_reason;
  std::optional<policy::EvalErrorKind> failure_kind;  // when valid == false
  int failure_step = -1;
  std::vector<StepRecord> trajectory;  // filled only when recording
};

struct RolloutOptions {
  int horizon = 1000;
  std::optional<uint64_t> seed;   // absent: deterministic default reset
  bool record = false;            // keep per-step trajectory
  bool stop_on_catch = false;     // experiment mode for ball-in-cup
  policy::SandboxLimits limits;
};

// Closed-loop episode: observe, evaluate policy, step, accumulate the stage
// reward of (post-step state, action). Sandbox failures are encoded in the
// result, never thrown.
RolloutResult Rollout(const policy::PolicyProgram& program, env::EnvId env_id,
                      const RolloutOptions& opts);

void WriteTrajectoryCsv(std::ostream& os, env::EnvId env_id, const RolloutResult& r);

struct ScoredProgram {
  std::shared_ptr<const policy::PolicyProgram> program;
  std::string canonical_source;
  double score = 0.0;
  env::EnvId env_id = env::EnvId::kPendulumSwingup;
  int iteration = 0;
  std::string generator_id;
  int island = -1;
};

enum class RejectionCategory { kParseError, kRuntimeError, kNonFinite, kBudgetExceeded };

const char* RejectionCategoryName(RejectionCategory c);

struct Rejection {
  RejectionCategory category;
  std::string message;
};

using CandidateOutcome = std::variant<ScoredProgram, Rejection>;

struct EvaluateOptions {
  int horizon = 1000;
  std::optional<uint64_t> eval_seed;  // fixed per run
  int eval_episodes = 1;              // scores averaged over derived seeds
  policy::SandboxLimits limits;
};

// Raw generator output in, scored program or categorized rejection out.
// Never throws for candidate-level failures.
CandidateOutcome EvaluateCandidate(const std::string& source, env::EnvId env_id,
                                   const EvaluateOptions& opts);

}  // namespace evoctl::eval

#endif  // EVOCTL_EVALUATION_HPP_
