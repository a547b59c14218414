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

#include "evoctl/task_spec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "evoctl/policy_lang.hpp"
#include "evoctl/rng.hpp"

namespace evoctl::spec {
namespace {

std::string Trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct SpecFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string starter;  // fenced block inside [starter]
  bool has_starter = false;
};

// Sectioned key = value text with one fenced (```) program block allowed in
// [starter]. '#' starts a comment outside fences.
SpecFile ParseSpecFile(const std::string& text, const std::string& path) {
  SpecFile out;
  std::istringstream is(text);
  std::string line;
  std::string section;
  bool in_fence = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_fence) {
      if (Trim(line).rfind("```", 0) == 0) {
        in_fence = false;
      } else {
        out.starter += line;
        out.starter += '\n';
      }
      continue;
    }
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      continue;
    }
    if (t.rfind("```", 0) == 0) {
      if (section != "starter") {
        throw SpecError(path + ":" + std::to_string(lineno) +
                        ": fenced block only allowed in [starter]");
      }
      if (out.has_starter) {
        throw SpecError(path + ":" + std::to_string(lineno) + ": multiple starter blocks");
      }
      in_fence = true;
      out.has_starter = true;
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw SpecError(path + ":" + std::to_string(lineno) + ": expected key = value, got '" +
                      t + "'");
    }
    if (section.empty()) {
      throw SpecError(path + ":" + std::to_string(lineno) + ": key outside any [section]");
    }
    out.sections[section][Trim(t.substr(0, eq))] = Trim(t.substr(eq + 1));
  }
  if (in_fence) throw SpecError(path + ": unterminated starter fence");
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SpecError("cannot open file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

int64_t ParseInt(const std::string& value, const std::string& what) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw SpecError(what + " must be an integer, got '" + value + "'");
  }
  return v;
}

uint64_t ParseU64(const std::string& value, const std::string& what) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw SpecError(what + " must be a non-negative integer, got '" + value + "'");
  }
  return v;
}

double ParseDouble(const std::string& value, const std::string& what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw SpecError(what + " must be a number, got '" + value + "'");
  }
  return v;
}

void ApplyRunKey(RunConfig* cfg, const std::string& key, const std::string& value) {
  if (key == "islands") {
    cfg->islands = static_cast<int>(ParseInt(value, key));
  } else if (key == "candidates_per_prompt") {
    cfg->candidates_per_prompt = static_cast<int>(ParseInt(value, key));
  } else if (key == "max_candidates") {
    cfg->max_candidates = static_cast<int>(ParseInt(value, key));
  } else if (key == "reset_period") {
    cfg->reset_period = static_cast<int>(ParseInt(value, key));
  } else if (key == "seed") {
    cfg->seed = ParseU64(value, key);
  } else if (key == "generator") {
    if (value == "mock") {
      cfg->generator = GeneratorKind::kMock;
    } else if (value == "remote") {
      cfg->generator = GeneratorKind::kRemote;
    } else {
      throw SpecError("generator must be 'mock' or 'remote', got '" + value + "'");
    }
  } else if (key == "db_capacity_per_island") {
    cfg->db_capacity_per_island = static_cast<int>(ParseInt(value, key));
  } else if (key == "tau_db") {
    cfg->tau_db = ParseDouble(value, key);
  } else if (key == "eval_episodes") {
    cfg->eval_episodes = static_cast<int>(ParseInt(value, key));
  } else if (key == "eval_seed") {
    cfg->eval_seed = ParseU64(value, key);
  } else if (key == "checkpoint_every") {
    cfg->checkpoint_every = static_cast<int>(ParseInt(value, key));
  } else if (key == "workers") {
    cfg->workers = static_cast<int>(ParseInt(value, key));
  } else if (key == "target_score") {
    cfg->target_score = ParseDouble(value, key);
  } else if (key == "temperature") {
    cfg->temperature = ParseDouble(value, key);
  } else if (key == "top_p") {
    cfg->top_p = ParseDouble(value, key);
  } else if (key == "repeat_last_n") {
    cfg->repeat_last_n = static_cast<int>(ParseInt(value, key));
  } else if (key == "max_tokens") {
    cfg->max_tokens = static_cast<int>(ParseInt(value, key));
  } else if (key == "endpoint") {
    cfg->endpoint = value;
  } else if (key == "model") {
    cfg->model_id = value;
  } else {
    throw SpecError("unknown [run] key '" + key + "'");
  }
}

void ValidateRunConfig(const RunConfig& cfg) {
  if (cfg.islands < 2) throw SpecError("islands must be >= 2 (reset policy needs a survivor)");
  if (cfg.candidates_per_prompt < 1) throw SpecError("candidates_per_prompt must be >= 1");
  if (cfg.max_candidates < 0) throw SpecError("max_candidates must be >= 0");
  if (cfg.reset_period < 1) throw SpecError("reset_period must be >= 1");
  if (cfg.db_capacity_per_island < 1) throw SpecError("db_capacity_per_island must be >= 1");
  if (!(cfg.tau_db > 0)) throw SpecError("tau_db must be > 0");
  if (cfg.eval_episodes < 1) throw SpecError("eval_episodes must be >= 1");
  if (cfg.checkpoint_every < 1) throw SpecError("checkpoint_every must be >= 1");
  if (cfg.workers < 1) throw SpecError("workers must be >= 1");
  if (!(cfg.temperature > 0)) throw SpecError("temperature must be > 0");
  if (!(cfg.top_p > 0) || cfg.top_p > 1) throw SpecError("top_p must be in (0, 1]");
}

}  // namespace

std::string DefaultStarterSource(env::EnvId env_id) {
  if (env::ActionDim(env_id) == 1) {
    return "def policy(obs: np.ndarray) -> float:\n"
           "  \"\"\"Returns an action between -1 and 1.\"\"\"\n"
           "  return 0.0\n";
  }
  std::string dim = std::to_string(env::ActionDim(env_id));
  return "def policy(obs: np.ndarray) -> np.ndarray:\n"
         "  \"\"\"Returns " + dim + " actions between -1 and 1.\"\"\"\n"
         "  return np.zeros((" + dim + ",))\n";
}

TaskSpec LoadSpecFromText(const std::string& text, const std::string& path) {
  SpecFile file = ParseSpecFile(text, path);
  TaskSpec spec;

  auto env_section = file.sections.find("env");
  if (env_section == file.sections.end() || !env_section->second.count("id")) {
    throw SpecError(path + ": missing [env] section with an 'id' key");
  }
  const std::string& env_name = env_section->second.at("id");
  auto env_id = env::EnvIdFromString(env_name);
  if (!env_id) {
    throw SpecError(path + ": unknown env id '" + env_name +
                    "' (expected pendulum_swingup or ball_in_cup)");
  }
  spec.env_id = *env_id;
  spec.obs_dim = env::ObsDim(spec.env_id);
  spec.action_dim = env::ActionDim(spec.env_id);

  if (env_section->second.count("horizon")) {
    spec.horizon = static_cast<int>(ParseInt(env_section->second.at("horizon"), "horizon"));
  }
  if (spec.horizon < 1) throw SpecError(path + ": horizon must be >= 1");

  auto task_section = file.sections.find("task");
  if (task_section != file.sections.end() && task_section->second.count("description")) {
    spec.task_description = task_section->second.at("description");
  }
  if (spec.task_description.empty()) {
    spec.task_description = std::string("Find a policy for the ") + env::EnvIdName(spec.env_id) +
                            " control task.";
  }

  spec.starter_policy_source = file.has_starter && !Trim(file.starter).empty()
                                   ? file.starter
                                   : DefaultStarterSource(spec.env_id);

  // Side-checks: the starter must parse and must run on a zero observation.
  policy::PolicyProgram starter =
      policy::Parse(spec.starter_policy_source, spec.obs_dim, spec.action_dim);
  std::vector<double> zero_obs(static_cast<size_t>(spec.obs_dim), 0.0);
  policy::EvalPolicy(starter, zero_obs);

  return spec;
}

TaskSpec LoadSpec(const std::string& path) { return LoadSpecFromText(ReadFile(path), path); }

RunConfig LoadRunConfig(const std::string& path,
                        const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  if (!path.empty()) {
    SpecFile file = ParseSpecFile(ReadFile(path), path);
    auto run = file.sections.find("run");
    if (run != file.sections.end()) {
      for (const auto& [key, value] : run->second) ApplyRunKey(&cfg, key, value);
    }
  }
  for (const auto& [key, value] : overrides) ApplyRunKey(&cfg, key, value);
  ValidateRunConfig(cfg);
  return cfg;
}

uint64_t RunConfigHash(const RunConfig& cfg, const TaskSpec& spec) {
  std::ostringstream os;
  os << spec.task_description << '|' << env::EnvIdName(spec.env_id) << '|' << spec.horizon
     << '|' << spec.starter_policy_source << '|' << cfg.islands << '|'
     << cfg.candidates_per_prompt << '|' << cfg.max_candidates << '|' << cfg.reset_period << '|'
     << cfg.seed << '|' << static_cast<int>(cfg.generator) << '|' << cfg.db_capacity_per_island
     << '|' << cfg.tau_db << '|' << cfg.eval_episodes << '|'
     << (cfg.eval_seed ? std::to_string(*cfg.eval_seed) : "none") << '|' << cfg.checkpoint_every;
  return Fnv1a64(os.str());
}

}  // namespace evoctl::spec
