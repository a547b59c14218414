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

#ifndef EVOCTL_ORCHESTRATOR_HPP_
#define EVOCTL_ORCHESTRATOR_HPP_

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evoctl/evaluation.hpp"
#include "evoctl/island_db.hpp"
#include "evoctl/task_spec.hpp"

namespace evoctl::run {

struct RunReport {
  int candidates_generated = 0;
  int candidates_valid = 0;
  std::array<int, 4> rejections{};  // indexed by RejectionCategory
  int extraction_failures = 0;
  std::optional<eval::ScoredProgram> best;
  double starter_score = 0.0;
  bool starter_valid = true;
  // (candidate index, score) whenever the best improves; starter is index 0.
  std::vector<std::pair<int, double>> best_score_trace;
  double wall_time_s = 0.0;
  int iterations = 0;
};

struct RunOptions {
  std::string out_dir;           // empty: no files written
  std::string resume_checkpoint; // empty: fresh run
};

// The outer evolutionary loop: sample parents, build prompt, generate,
// evaluate, register, reset islands periodically, checkpoint periodically.
// Deterministic for generator=mock and a fixed seed, regardless of workers.
// Transport failures checkpoint and then rethrow gen::TransportError.
RunReport Run(const spec::TaskSpec& task, const spec::RunConfig& cfg, const RunOptions& opts);

// Serialized search state: header record (config hash, counters, rng
// states, report-so-far) plus one record per stored program.
void WriteCheckpoint(const std::string& path, const spec::TaskSpec& task,
                     const spec::RunConfig& cfg, const db::IslandDatabase& database,
                     const Rng& generator_rng, const RunReport& report);

struct RestoredRun {
  db::IslandDatabase database;
  Rng generator_rng;
  RunReport report;
  uint64_t config_hash = 0;
  env::EnvId env_id = env::EnvId::kPendulumSwingup;
  int horizon = 1000;
  std::optional<uint64_t> eval_seed;
  int eval_episodes = 1;
};

RestoredRun RestoreCheckpoint(const std::string& path);

// Re-evaluates a stored program with trajectory recording. `selector` is
// "best" or the zero-based record index in the checkpoint. The re-evaluated
// score must match the stored score exactly; a mismatch throws.
struct ReplayOutcome {
  eval::RolloutResult rollout;
  eval::ScoredProgram program;
};
ReplayOutcome Replay(const std::string& checkpoint_path, const std::string& selector);

void WriteReportFiles(const std::string& out_dir, const RunReport& report);

}  // namespace evoctl::run

#endif  // EVOCTL_ORCHESTRATOR_HPP_
