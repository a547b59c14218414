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

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "evoctl/generation.hpp"
#include "evoctl/policy_lang.hpp"

namespace evoctl::gen {
namespace {

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

int IndentWidth(const std::string& line) {
  int w = 0;
  for (char c : line) {
    if (c == ' ') {
      ++w;
    } else if (c == '\t') {
      w += 8 - w % 8;
    } else {
      break;
    }
  }
  return w;
}

bool IsBlank(const std::string& line) {
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool IsFence(const std::string& line) {
  size_t i = line.find_first_not_of(" \t");
  return i != std::string::npos && line.compare(i, 3, "```") == 0;
}

// Matches `def <name>(` at the line start (after indentation); returns the
// function name or empty.
std::string DefName(const std::string& line) {
  size_t i = line.find_first_not_of(" \t");
  if (i == std::string::npos || line.compare(i, 4, "def ") != 0) return {};
  size_t start = i + 4;
  while (start < line.size() && line[start] == ' ') ++start;
  size_t end = start;
  while (end < line.size() &&
         (std::isalnum(static_cast<unsigned char>(line[end])) || line[end] == '_')) {
    ++end;
  }
  if (end == start) return {};
  size_t paren = line.find_first_not_of(" \t", end);
  if (paren == std::string::npos || line[paren] != '(') return {};
  return line.substr(start, end - start);
}

std::string Dedent(const std::string& line, int width) {
  int w = 0;
  size_t i = 0;
  while (i < line.size() && w < width) {
    if (line[i] == ' ') {
      ++w;
    } else if (line[i] == '\t') {
      w += 8 - w % 8;
    } else {
      break;
    }
    ++i;
  }
  return line.substr(i);
}

}  // namespace

Prompt BuildPrompt(const policy::PolicyProgram& low, const policy::PolicyProgram& high,
                   const std::string& task_description) {
  Prompt p;
  p.low_source = policy::PrettyPrint(low, "policy_v0");
  p.high_source = policy::PrettyPrint(high, "policy_v1");

  std::ostringstream os;
  os << "\"\"\"" << task_description << "\n";
  os << "On every iteration, improve policy_v1 over the policy_vX methods "
        "from previous iterations.\n\"\"\"\n";
  os << "import numpy as np\n\n";
  os << p.low_source << "\n";
  os << p.high_source << "\n";
  os << "def policy_v2(" << high.param << ": np.ndarray) -> "
     << (high.action_dim == 1 ? "float" : "np.ndarray") << ":\n";
  os << "  \"\"\" Improved version of 'policy_v1'.\"\"\"\n";
  p.text = os.str();
  return p;
}

std::optional<std::string> ExtractPolicy(const std::string& llm_text,
                                         const std::string& request_name) {
  std::vector<std::string> lines;
  for (auto& line : SplitLines(llm_text)) {
    if (!IsFence(line)) lines.push_back(line);
  }

  // First pass: the requested header. Second pass: any policy* function.
  int def_idx = -1;
  for (int pass = 0; pass < 2 && def_idx < 0; ++pass) {
    for (size_t i = 0; i < lines.size(); ++i) {
      std::string name = DefName(lines[i]);
      if (name.empty()) continue;
      const bool match =
          pass == 0 ? name == request_name : name.rfind("policy", 0) == 0;
      if (match) {
        def_idx = static_cast<int>(i);
        break;
      }
    }
  }
  if (def_idx < 0) return std::nullopt;

  const int def_indent = IndentWidth(lines[static_cast<size_t>(def_idx)]);
  std::vector<std::string> out;
  {
    // Rename the function to the canonical `policy`.
    std::string header = Dedent(lines[static_cast<size_t>(def_idx)], def_indent);
    const std::string name = DefName(header);
    const size_t at = header.find(name);
    header.replace(at, name.size(), "policy");
    out.push_back(header);
  }
  bool any_body = false;
  for (size_t i = static_cast<size_t>(def_idx) + 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (IsBlank(line)) {
      out.push_back("");
      continue;
    }
    if (IndentWidth(line) <= def_indent) break;  // dedent ends the function
    out.push_back(Dedent(line, def_indent));
    any_body = true;
  }
  if (!any_body) return std::nullopt;

  std::string result;
  for (const auto& line : out) {
    result += line;
    result += '\n';
  }
  return result;
}

}  // namespace evoctl::gen
