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

#include "evoctl/island_db.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace evoctl::db {

double Island::BestScore() const {
  return members.empty() ? -std::numeric_limits<double>::infinity() : members.front().score;
}

IslandDatabase::IslandDatabase(int islands, int capacity_per_island, double tau,
                               uint64_t sampler_seed)
    : capacity_(capacity_per_island), tau_(tau), rng_(sampler_seed) {
  if (islands < 2) throw std::invalid_argument("need at least 2 islands");
  if (capacity_per_island < 1) throw std::invalid_argument("island capacity must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("sampling temperature must be > 0");
  islands_.resize(static_cast<size_t>(islands));
  for (int i = 0; i < islands; ++i) islands_[static_cast<size_t>(i)].id = i;
}

bool IslandDatabase::Register(const eval::ScoredProgram& sp, int island_id) {
  if (island_id < 0 || island_id >= static_cast<int>(islands_.size())) {
    throw std::out_of_range("invalid island id " + std::to_string(island_id));
  }
  if (!std::isfinite(sp.score)) {
    throw std::invalid_argument("refusing to register non-finite score");
  }
  Island& island = islands_[static_cast<size_t>(island_id)];
  for (const auto& m : island.members) {
    if (m.canonical_source == sp.canonical_source) return false;
  }
  if (static_cast<int>(island.members.size()) >= capacity_ &&
      sp.score <= island.members.back().score) {
    return false;  // would be evicted immediately
  }
  auto pos = std::upper_bound(
      island.members.begin(), island.members.end(), sp.score,
      [](double score, const eval::ScoredProgram& m) { return score > m.score; });
  eval::ScoredProgram copy = sp;
  copy.island = island_id;
  island.members.insert(pos, std::move(copy));
  if (static_cast<int>(island.members.size()) > capacity_) island.members.pop_back();
  ++registrations_;
  return true;
}

SampledPair IslandDatabase::SamplePromptPrograms(const policy::PolicyProgram& starter) {
  SampledPair out;
  out.island_id = static_cast<int>(rng_.UniformInt(islands_.size()));
  const Island& island = islands_[static_cast<size_t>(out.island_id)];

  if (island.members.empty()) {
    out.low = out.high = &starter;
    return out;
  }
  if (island.members.size() == 1) {
    out.low = out.high = island.members.front().program.get();
    return out;
  }

  // Softmax over scores, numerically stabilized against the island max.
  const size_t n = island.members.size();
  std::vector<double> weights(n);
  const double best = island.members.front().score;
  for (size_t i = 0; i < n; ++i) {
    weights[i] = std::exp((island.members[i].score - best) / tau_);
  }
  auto draw = [&](int exclude) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i) != exclude) total += weights[i];
    }
    double r = rng_.Uniform() * total;
    for (size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i) == exclude) continue;
      r -= weights[i];
      if (r <= 0.0) return static_cast<int>(i);
    }
    return exclude == static_cast<int>(n) - 1 ? static_cast<int>(n) - 2
                                              : static_cast<int>(n) - 1;
  };
  const int first = draw(-1);
  const int second = draw(first);
  // Members are sorted descending, so the smaller index is the better one.
  const auto& hi = island.members[static_cast<size_t>(std::min(first, second))];
  const auto& lo = island.members[static_cast<size_t>(std::max(first, second))];
  out.high = hi.program.get();
  out.low = lo.program.get();
  return out;
}

void IslandDatabase::ResetIslands() {
  const int n = static_cast<int>(islands_.size());
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  // Best first; ties broken by lower id (stable on the id-ordered input).
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return islands_[static_cast<size_t>(a)].BestScore() >
           islands_[static_cast<size_t>(b)].BestScore();
  });

  const int reset_count = n / 2;
  const int survivor_count = n - reset_count;
  std::vector<int> survivors(order.begin(), order.begin() + survivor_count);
  std::vector<int> donors;
  for (int id : survivors) {
    if (!islands_[static_cast<size_t>(id)].Empty()) donors.push_back(id);
  }

  for (int k = survivor_count; k < n; ++k) {
    Island& victim = islands_[static_cast<size_t>(order[static_cast<size_t>(k)])];
    victim.members.clear();
    if (donors.empty()) continue;  // nothing to reseed from
    const int donor_id = donors[rng_.UniformInt(donors.size())];
    const Island& donor = islands_[static_cast<size_t>(donor_id)];
    eval::ScoredProgram seed = donor.members.front();
    seed.island = victim.id;
    victim.members.push_back(std::move(seed));
  }
}

void IslandDatabase::RestoreMembers(int island_id, std::vector<eval::ScoredProgram> members) {
  if (island_id < 0 || island_id >= static_cast<int>(islands_.size())) {
    throw std::out_of_range("invalid island id " + std::to_string(island_id));
  }
  if (static_cast<int>(members.size()) > capacity_) {
    throw std::invalid_argument("restored island exceeds capacity");
  }
  for (size_t k = 1; k < members.size(); ++k) {
    if (members[k - 1].score < members[k].score) {
      throw std::invalid_argument("restored island members out of order");
    }
  }
  for (auto& m : members) m.island = island_id;
  islands_[static_cast<size_t>(island_id)].members = std::move(members);
}

std::optional<eval::ScoredProgram> IslandDatabase::GlobalBest() const {
  const eval::ScoredProgram* best = nullptr;
  for (const auto& island : islands_) {
    if (island.Empty()) continue;
    const auto& m = island.members.front();
    if (best == nullptr || m.score > best->score) best = &m;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

}  // namespace evoctl::db
