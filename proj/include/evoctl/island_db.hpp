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

#ifndef EVOCTL_ISLAND_DB_HPP_
#define EVOCTL_ISLAND_DB_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evoctl/evaluation.hpp"
#include "evoctl/rng.hpp"

namespace evoctl::db {

struct Island {
  int id = 0;
  // Sorted by score descending; ties keep insertion order (stable).
  std::vector<eval::ScoredProgram> members;

  bool Empty() const { return members.empty(); }
  // Max member score; meaningless when empty (guarded by callers).
  double BestScore() const;
};

struct SampledPair {
  int island_id = 0;
  const policy::PolicyProgram* low = nullptr;   // lower-scoring parent
  const policy::PolicyProgram* high = nullptr;  // higher-scoring parent
};

// Island-model store: bounded sorted populations, two-stage softmax
// sampling for prompts, periodic worst-half resets. Single-writer; samplers
// take the database by reference under the orchestrator's serialization.
class IslandDatabase {
 public:
  IslandDatabase(int islands, int capacity_per_island, double tau, uint64_t sampler_seed);

  // Inserts into the island, evicting the lowest scorer when over capacity.
  // Duplicate canonical sources within an island are dropped. Returns true
  // when the program was actually inserted.
  bool Register(const eval::ScoredProgram& sp, int island_id);

  // Two-stage sampling: island uniform, then two members without
  // replacement by softmax over scores at temperature tau. Islands with
  // fewer than two members fall back to (starter, starter) or (m, m).
  SampledPair SamplePromptPrograms(const policy::PolicyProgram& starter);

  // Ranks islands by best score (tie: lower id survives), empties the worst
  // floor(n/2), reseeds each emptied island with a copy of the best program
  // of a uniformly chosen non-empty surviving island.
  void ResetIslands();

  const std::vector<Island>& islands() const { return islands_; }
  int64_t registrations() const { return registrations_; }
  std::optional<eval::ScoredProgram> GlobalBest() const;

  int capacity_per_island() const { return capacity_; }
  double tau() const { return tau_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }
  void set_registrations(int64_t n) { registrations_ = n; }

  // Checkpoint restore path: installs members wholesale. They must already
  // be sorted by score descending and fit the capacity.
  void RestoreMembers(int island_id, std::vector<eval::ScoredProgram> members);

 private:
  std::vector<Island> islands_;
  int capacity_;
  double tau_;
  int64_t registrations_ = 0;
  Rng rng_;
};

}  // namespace evoctl::db

#endif  // EVOCTL_ISLAND_DB_HPP_
