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

#include "evoctl/orchestrator.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evoctl/generation.hpp"

namespace evoctl::run {
namespace {

using nlohmann::json;

json RngStateJson(const Rng& rng) {
  auto s = rng.state();
  return json::array({s[0], s[1], s[2], s[3]});
}

Rng RngFromJson(const json& j) {
  Rng rng;
  rng.set_state({j.at(0).get<uint64_t>(), j.at(1).get<uint64_t>(), j.at(2).get<uint64_t>(),
                 j.at(3).get<uint64_t>()});
  return rng;
}

json ScoredProgramJson(const eval::ScoredProgram& sp) {
  return json{{"island", sp.island},
              {"score", sp.score},
              {"iteration", sp.iteration},
              {"generator_id", sp.generator_id},
              {"source", sp.canonical_source}};
}

eval::ScoredProgram ScoredProgramFromJson(const json& j, env::EnvId env_id) {
  eval::ScoredProgram sp;
  sp.island = j.at("island").get<int>();
  sp.score = j.at("score").get<double>();
  sp.iteration = j.at("iteration").get<int>();
  sp.generator_id = j.at("generator_id").get<std::string>();
  sp.canonical_source = j.at("source").get<std::string>();
  sp.env_id = env_id;
  sp.program = std::make_shared<policy::PolicyProgram>(
      policy::Parse(sp.canonical_source, env::ObsDim(env_id), env::ActionDim(env_id)));
  return sp;
}

eval::EvaluateOptions MakeEvalOptions(const spec::TaskSpec& task, const spec::RunConfig& cfg) {
  eval::EvaluateOptions opts;
  opts.horizon = task.horizon;
  opts.eval_seed = cfg.eval_seed;
  opts.eval_episodes = cfg.eval_episodes;
  return opts;
}

// Evaluates a batch, optionally fanning out across workers. Results are
// joined in candidate order, so the outcome multiset and the registration
// order match the sequential run exactly.
std::vector<eval::CandidateOutcome> EvaluateBatch(const std::vector<std::string>& sources,
                                                  env::EnvId env_id,
                                                  const eval::EvaluateOptions& opts,
                                                  int workers) {
  std::vector<eval::CandidateOutcome> outcomes;
  outcomes.reserve(sources.size());
  if (workers <= 1 || sources.size() <= 1) {
    for (const auto& src : sources) {
      outcomes.push_back(eval::EvaluateCandidate(src, env_id, opts));
    }
    return outcomes;
  }
  std::vector<std::future<eval::CandidateOutcome>> futures;
  futures.reserve(sources.size());
  for (const auto& src : sources) {
    futures.push_back(std::async(std::launch::async, [&src, env_id, &opts] {
      return eval::EvaluateCandidate(src, env_id, opts);
    }));
  }
  for (auto& f : futures) outcomes.push_back(f.get());
  return outcomes;
}

}  // namespace

void WriteCheckpoint(const std::string& path, const spec::TaskSpec& task,
                     const spec::RunConfig& cfg, const db::IslandDatabase& database,
                     const Rng& generator_rng, const RunReport& report) {
  json header{
      {"kind", "header"},
      {"config_hash", spec::RunConfigHash(cfg, task)},
      {"env_id", env::EnvIdName(task.env_id)},
      {"horizon", task.horizon},
      {"islands", static_cast<int>(database.islands().size())},
      {"capacity", database.capacity_per_island()},
      {"tau", database.tau()},
      {"registrations", database.registrations()},
      {"sampler_rng", RngStateJson(database.rng())},
      {"generator_rng", RngStateJson(generator_rng)},
      {"candidates_generated", report.candidates_generated},
      {"candidates_valid", report.candidates_valid},
      {"rejections", report.rejections},
      {"extraction_failures", report.extraction_failures},
      {"iterations", report.iterations},
      {"starter_score", report.starter_score},
      {"starter_valid", report.starter_valid},
      {"trace", report.best_score_trace},
      {"eval_episodes", cfg.eval_episodes},
      {"best", report.best ? ScoredProgramJson(*report.best) : json(nullptr)},
  };
  if (cfg.eval_seed) header["eval_seed"] = *cfg.eval_seed;

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  os << header.dump() << '\n';
  for (const auto& island : database.islands()) {
    for (const auto& m : island.members) {
      os << ScoredProgramJson(m).dump() << '\n';
    }
  }
  if (!os.good()) throw std::runtime_error("checkpoint write failed: " + path);
}

RestoredRun RestoreCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("malformed checkpoint: empty file");

  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint header: ") + e.what());
  }
  try {
    if (header.at("kind").get<std::string>() != "header") {
      throw std::runtime_error("malformed checkpoint: first record is not a header");
    }
    auto env_id = env::EnvIdFromString(header.at("env_id").get<std::string>());
    if (!env_id) throw std::runtime_error("malformed checkpoint: unknown env id");

    RestoredRun out{
        db::IslandDatabase(header.at("islands").get<int>(), header.at("capacity").get<int>(),
                           header.at("tau").get<double>(), 0),
        Rng(0), RunReport{}, 0, *env_id, header.at("horizon").get<int>(), std::nullopt,
        header.at("eval_episodes").get<int>()};
    out.config_hash = header.at("config_hash").get<uint64_t>();
    if (header.contains("eval_seed")) out.eval_seed = header.at("eval_seed").get<uint64_t>();
    out.database.rng() = RngFromJson(header.at("sampler_rng"));
    out.generator_rng = RngFromJson(header.at("generator_rng"));

    out.report.candidates_generated = header.at("candidates_generated").get<int>();
    out.report.candidates_valid = header.at("candidates_valid").get<int>();
    out.report.rejections = header.at("rejections").get<std::array<int, 4>>();
    out.report.extraction_failures = header.at("extraction_failures").get<int>();
    out.report.iterations = header.at("iterations").get<int>();
    out.report.starter_score = header.at("starter_score").get<double>();
    out.report.starter_valid = header.at("starter_valid").get<bool>();
    out.report.best_score_trace =
        header.at("trace").get<std::vector<std::pair<int, double>>>();
    if (!header.at("best").is_null()) {
      out.report.best = ScoredProgramFromJson(header.at("best"), *env_id);
    }

    // Program records, already in sorted order per island.
    std::vector<std::vector<eval::ScoredProgram>> members(
        static_cast<size_t>(header.at("islands").get<int>()));
    int lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      json record = json::parse(line);
      eval::ScoredProgram sp = ScoredProgramFromJson(record, *env_id);
      if (sp.island < 0 || sp.island >= static_cast<int>(members.size())) {
        throw std::runtime_error("malformed checkpoint: bad island id at line " +
                                 std::to_string(lineno));
      }
      members[static_cast<size_t>(sp.island)].push_back(std::move(sp));
    }
    const int64_t registrations = header.at("registrations").get<int64_t>();
    auto& islands = const_cast<std::vector<db::Island>&>(out.database.islands());
    for (size_t i = 0; i < members.size(); ++i) {
      for (size_t k = 1; k < members[i].size(); ++k) {
        if (members[i][k - 1].score < members[i][k].score) {
          throw std::runtime_error("malformed checkpoint: island members out of order");
        }
      }
      islands[i].members = std::move(members[i]);
    }
    out.database.set_registrations(registrations);
    return out;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
  }
}

RunReport Run(const spec::TaskSpec& task, const spec::RunConfig& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const eval::EvaluateOptions eval_opts = MakeEvalOptions(task, cfg);
  const std::string generator_id =
      cfg.generator == spec::GeneratorKind::kMock ? "mock" : "remote:" + cfg.model_id;

  policy::PolicyProgram starter =
      policy::Parse(task.starter_policy_source, task.obs_dim, task.action_dim);

  RunReport report;
  std::optional<db::IslandDatabase> database;
  Rng generator_rng(StreamSeed(cfg.seed, "generator"));

  if (!opts.resume_checkpoint.empty()) {
    RestoredRun restored = RestoreCheckpoint(opts.resume_checkpoint);
    if (restored.config_hash != spec::RunConfigHash(cfg, task)) {
      throw std::runtime_error(
          "checkpoint was produced by a different spec/config (hash mismatch)");
    }
    database.emplace(std::move(restored.database));
    generator_rng = restored.generator_rng;
    report = std::move(restored.report);
  } else {
    database.emplace(cfg.islands, cfg.db_capacity_per_island, cfg.tau_db,
                     StreamSeed(cfg.seed, "db-sampler"));
    // The starter is the baseline: candidate index 0 in the trace.
    eval::CandidateOutcome starter_outcome =
        eval::EvaluateCandidate(task.starter_policy_source, task.env_id, eval_opts);
    if (const auto* sp = std::get_if<eval::ScoredProgram>(&starter_outcome)) {
      report.starter_score = sp->score;
      report.best = *sp;
      report.best->generator_id = "starter";
      report.best_score_trace.emplace_back(0, sp->score);
    } else {
      report.starter_valid = false;
    }
  }

  auto out_path = [&](const std::string& name) {
    return (std::filesystem::path(opts.out_dir) / name).string();
  };
  auto checkpoint_now = [&](int at) {
    if (opts.out_dir.empty()) return;
    WriteCheckpoint(out_path("ckpt-" + std::to_string(at) + ".db"), task, cfg, *database,
                    generator_rng, report);
  };
  if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);

  int next_checkpoint = (report.candidates_generated / cfg.checkpoint_every + 1) *
                        cfg.checkpoint_every;

  auto target_reached = [&] {
    return cfg.target_score && report.best && report.best->score >= *cfg.target_score;
  };

  while (report.candidates_generated < cfg.max_candidates && !target_reached()) {
    db::SampledPair parents = database->SamplePromptPrograms(starter);
    gen::Prompt prompt = gen::BuildPrompt(*parents.low, *parents.high, task.task_description);

    gen::CandidateBatch batch;
    if (cfg.generator == spec::GeneratorKind::kMock) {
      batch = gen::GenerateMock(*parents.low, *parents.high, generator_rng,
                                cfg.candidates_per_prompt);
    } else {
      gen::GeneratorParams params;
      params.temperature = cfg.temperature;
      params.top_p = cfg.top_p;
      params.repeat_last_n = cfg.repeat_last_n;
      params.max_tokens = cfg.max_tokens;
      params.endpoint = cfg.endpoint;
      params.model_id = cfg.model_id;
      if (const char* key = std::getenv("EVOCTL_API_KEY")) params.api_key = key;
      try {
        batch = gen::GenerateRemote(prompt, params, cfg.candidates_per_prompt);
      } catch (const gen::TransportError&) {
        // Leave a valid checkpoint behind before surfacing the failure.
        checkpoint_now(report.candidates_generated);
        throw;
      }
    }
    report.extraction_failures += batch.extraction_failures;
    ++report.iterations;

    std::vector<eval::CandidateOutcome> outcomes =
        EvaluateBatch(batch.sources, task.env_id, eval_opts, cfg.workers);

    for (auto& outcome : outcomes) {
      ++report.candidates_generated;
      if (auto* rejection = std::get_if<eval::Rejection>(&outcome)) {
        ++report.rejections[static_cast<size_t>(rejection->category)];
        continue;
      }
      auto& sp = std::get<eval::ScoredProgram>(outcome);
      ++report.candidates_valid;
      sp.iteration = report.iterations;
      sp.generator_id = batch.generator_id;
      const bool improved = !report.best || sp.score > report.best->score;
      if (database->Register(sp, parents.island_id) &&
          database->registrations() % cfg.reset_period == 0) {
        database->ResetIslands();
      }
      if (improved) {
        report.best = sp;
        report.best->island = parents.island_id;
        report.best_score_trace.emplace_back(report.candidates_generated, sp.score);
      }
      if (target_reached()) break;
    }

    if (report.candidates_generated >= next_checkpoint) {
      checkpoint_now(report.candidates_generated);
      next_checkpoint += cfg.checkpoint_every;
    }
  }

  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  checkpoint_now(report.candidates_generated);
  if (!opts.out_dir.empty()) WriteReportFiles(opts.out_dir, report);
  return report;
}

ReplayOutcome Replay(const std::string& checkpoint_path, const std::string& selector) {
  RestoredRun restored = RestoreCheckpoint(checkpoint_path);

  std::optional<eval::ScoredProgram> chosen;
  if (selector == "best") {
    auto best = restored.database.GlobalBest();
    if (!best && restored.report.best) best = restored.report.best;
    if (!best) throw std::runtime_error("checkpoint contains no programs");
    chosen = std::move(*best);
  } else {
    int wanted = -1;
    try {
      wanted = std::stoi(selector);
    } catch (...) {
      throw std::runtime_error("selector must be 'best' or a record index");
    }
    int index = 0;
    for (const auto& island : restored.database.islands()) {
      for (const auto& m : island.members) {
        if (index == wanted) chosen = m;
        ++index;
      }
    }
    if (!chosen) {
      throw std::runtime_error("program id " + std::to_string(wanted) + " not found (" +
                               std::to_string(index) + " records)");
    }
  }

  eval::RolloutOptions ro;
  ro.horizon = restored.horizon;
  ro.record = true;
  if (restored.eval_seed) {
    ro.seed = restored.eval_episodes == 1
                  ? *restored.eval_seed
                  : StreamSeed(*restored.eval_seed, "episode-0");
  }
  ReplayOutcome out{eval::Rollout(*chosen->program, restored.env_id, ro), *chosen};
  if (restored.eval_episodes == 1 &&
      (!out.rollout.valid || out.rollout.return_R != chosen->score)) {
    throw std::runtime_error("replayed score does not match the stored score");
  }
  return out;
}

void WriteReportFiles(const std::string& out_dir, const RunReport& report) {
  std::filesystem::create_directories(out_dir);

  json j{
      {"candidates_generated", report.candidates_generated},
      {"candidates_valid", report.candidates_valid},
      {"rejections",
       {{"parse_error", report.rejections[0]},
        {"runtime_error", report.rejections[1]},
        {"nonfinite", report.rejections[2]},
        {"budget_exceeded", report.rejections[3]}}},
      {"extraction_failures", report.extraction_failures},
      {"starter_score", report.starter_score},
      {"starter_valid", report.starter_valid},
      {"iterations", report.iterations},
      {"wall_time_s", report.wall_time_s},
      {"best_score_trace", report.best_score_trace},
      {"best", report.best ? ScoredProgramJson(*report.best) : json(nullptr)},
  };
  {
    std::ofstream os((std::filesystem::path(out_dir) / "report.json").string());
    os << j.dump(2) << '\n';
  }
  {
    std::ostringstream text;
    text << "candidates generated: " << report.candidates_generated << '\n'
         << "candidates valid:     " << report.candidates_valid << '\n'
         << "rejections:           parse=" << report.rejections[0]
         << " runtime=" << report.rejections[1] << " nonfinite=" << report.rejections[2]
         << " budget=" << report.rejections[3] << '\n'
         << "extraction failures:  " << report.extraction_failures << '\n'
         << "starter score:        " << report.starter_score << '\n'
         << "iterations:           " << report.iterations << '\n'
         << "wall time:            " << report.wall_time_s << " s\n";
    if (report.best) {
      text << "best score:           " << report.best->score << " (iteration "
           << report.best->iteration << ", " << report.best->generator_id << ")\n";
    }
    std::ofstream os((std::filesystem::path(out_dir) / "report.txt").string());
    os << text.str();
  }
  if (report.best) {
    std::ofstream os((std::filesystem::path(out_dir) / "best_policy.txt").string());
    os << report.best->canonical_source;
  }
}

}  // namespace evoctl::run
