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

#include "evoctl/evaluation.hpp"

#include <charconv>
#include <cmath>

#include "evoctl/rng.hpp"

namespace evoctl::eval {
namespace {

std::string Shortest(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

const char* RejectionCategoryName(RejectionCategory c) {
  switch (c) {
    case RejectionCategory::kParseError: return "parse_error";
    case RejectionCategory::kRuntimeError: return "runtime_error";
    case RejectionCategory::kNonFinite: return "nonfinite";
    case RejectionCategory::kBudgetExceeded: return "budget_exceeded";
  }
  return "?";
}

RolloutResult Rollout(const policy::PolicyProgram& program, env::EnvId env_id,
                      const RolloutOptions& opts) {
  RolloutResult r;
  env::EnvState state = env::Reset(env_id, opts.seed);
  double cumulative = 0.0;
  for (int t = 0; t < opts.horizon; ++t) {
    std::vector<double> obs = env::Observe(env_id, state);
    policy::Action action;
    try {
      action = policy::EvalPolicy(program, obs, opts.limits);
    } catch (const policy::EvalError& e) {
      r.valid = false;
      r.failure_kind = e.kind();
      r.failure_step = t;
      r.termination_reason = e.what();
      r.return_R = 0.0;
      return r;
    }
    state = env::Step(env_id, state, action);
    const double reward = env::Reward(env_id, state, action);
    cumulative += reward;
    r.steps_completed = t + 1;
    if (opts.record) {
      StepRecord rec;
      rec.t = t;
      rec.state = env::StateComponents(env_id, state);
      rec.obs = std::move(obs);
      rec.action.assign(action.AsSpan().begin(), action.AsSpan().end());
      rec.reward = reward;
      rec.cumulative = cumulative;
      r.trajectory.push_back(std::move(rec));
    }
    if (opts.stop_on_catch && env::Caught(env_id, state)) {
      r.terminated_early = true;
      r.termination_reason = "caught";
      break;
    }
  }
  r.return_R = cumulative;
  return r;
}

void WriteTrajectoryCsv(std::ostream& os, env::EnvId env_id, const RolloutResult& r) {
  os << "t";
  for (const auto& h : env::StateHeader(env_id)) os << ',' << h;
  const int obs_dim = env::ObsDim(env_id);
  const int act_dim = env::ActionDim(env_id);
  for (int i = 0; i < obs_dim; ++i) os << ",obs" << i;
  for (int i = 0; i < act_dim; ++i) os << ",action" << i;
  os << ",reward,cumulative_return\n";
  for (const auto& rec : r.trajectory) {
    os << rec.t;
    for (double v : rec.state) os << ',' << Shortest(v);
    for (double v : rec.obs) os << ',' << Shortest(v);
    for (double v : rec.action) os << ',' << Shortest(v);
    os << ',' << Shortest(rec.reward) << ',' << Shortest(rec.cumulative) << '\n';
  }
}

CandidateOutcome EvaluateCandidate(const std::string& source, env::EnvId env_id,
                                   const EvaluateOptions& opts) {
  std::shared_ptr<policy::PolicyProgram> program;
  try {
    program = std::make_shared<policy::PolicyProgram>(
        policy::Parse(source, env::ObsDim(env_id), env::ActionDim(env_id)));
  } catch (const policy::ParseError& e) {
    return Rejection{RejectionCategory::kParseError, e.what()};
  }

  double total = 0.0;
  const int episodes = opts.eval_episodes < 1 ? 1 : opts.eval_episodes;
  for (int ep = 0; ep < episodes; ++ep) {
    RolloutOptions ro;
    ro.horizon = opts.horizon;
    ro.limits = opts.limits;
    if (opts.eval_seed) {
      ro.seed = episodes == 1 ? *opts.eval_seed
                              : StreamSeed(*opts.eval_seed, "episode-" + std::to_string(ep));
    }
    RolloutResult rr = Rollout(*program, env_id, ro);
    if (!rr.valid) {
      RejectionCategory cat = RejectionCategory::kRuntimeError;
      switch (*rr.failure_kind) {
        case policy::EvalErrorKind::kRuntime: cat = RejectionCategory::kRuntimeError; break;
        case policy::EvalErrorKind::kNonFinite: cat = RejectionCategory::kNonFinite; break;
        case policy::EvalErrorKind::kBudget: cat = RejectionCategory::kBudgetExceeded; break;
      }
      return Rejection{cat, "step " + std::to_string(rr.failure_step) + ": " +
                                rr.termination_reason};
    }
    total += rr.return_R;
  }
  if (!std::isfinite(total)) {
    return Rejection{RejectionCategory::kNonFinite, "non-finite episode return"};
  }

  ScoredProgram sp;
  sp.canonical_source = policy::PrettyPrint(*program);
  sp.program = std::move(program);
  sp.score = total / episodes;
  sp.env_id = env_id;
  return sp;
}

}  // namespace evoctl::eval
