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

#ifndef EVOCTL_POLICY_LANG_HPP_
#define EVOCTL_POLICY_LANG_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "evoctl/policy_ast.hpp"

namespace evoctl::policy {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                           ": " + message),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

// Parses one candidate policy. Accepts either a full `def name(obs): ...`
// function or a bare statement body (implicit `def policy(obs):`). Enforces
// the grammar and the static invariants: single function, whitelisted
// intrinsics only, literal indices, obs indices within [0, obs_dim), at
// least one return, no unknown identifiers. Throws ParseError.
PolicyProgram Parse(std::string_view source, int obs_dim, int action_dim);

// Canonical text form. Parse(PrettyPrint(p)) is structurally equal to p.
// `rename` substitutes the function name in the header (used for prompts);
// empty keeps the program's own name.
std::string PrettyPrint(const PolicyProgram& p, std::string_view rename = {});

enum class EvalErrorKind {
  kRuntime,    // bad arity/shape, undefined local, non-scalar condition, ...
  kNonFinite,  // NaN/inf intermediate or |value| > max_abs_value
  kBudget,     // AST-node visit budget exhausted
};

const char* EvalErrorKindName(EvalErrorKind k);

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  EvalErrorKind kind() const { return kind_; }

 private:
  EvalErrorKind kind_;
};

struct SandboxLimits {
  int64_t max_ops_per_call = 10000;  // AST node evaluations per policy call
  double max_abs_value = 1e9;        // numeric guard on every intermediate
};

// Control action. Components are finite and clamped to [-1, 1] by the
// sandbox on return.
struct Action {
  std::array<double, kMaxVectorLen> values{};
  int dim = 0;

  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
  std::span<const double> AsSpan() const { return {values.data(), static_cast<size_t>(dim)}; }
};

// Tree-walking evaluation of one policy call inside the sandbox. Pure and
// deterministic: identical (program, obs) give bit-identical actions.
// Throws EvalError on any abort.
Action EvalPolicy(const PolicyProgram& program, std::span<const double> obs,
                  const SandboxLimits& limits = {});

}  // namespace evoctl::policy

#endif  // EVOCTL_POLICY_LANG_HPP_
