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

#ifndef EVOCTL_POLICY_AST_HPP_
#define EVOCTL_POLICY_AST_HPP_

#include <memory>
#include <string>
#include <vector>

namespace evoctl::policy {

enum class BinOp { kAdd, kSub, kMul, kDiv };
enum class CmpOp { kLt, kLe, kGt, kGe, kEq, kNe };
enum class LogicOp { kAnd, kOr };

// Whitelisted intrinsics. The grammar admits nothing else callable.
enum class Intrinsic {
  kAbs, kSign, kSin, kCos, kTan, kAtan2, kSqrt, kExp, kTanh,
  kMin, kMax, kClip, kFloor,
};

int IntrinsicArity(Intrinsic f);
const char* IntrinsicName(Intrinsic f);  // canonical surface spelling

// Vectors in the language have a small fixed capacity; np.zeros((n,)) and
// [a, b, ...] literals beyond this are rejected at parse time.
inline constexpr int kMaxVectorLen = 8;

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

// One node type for all expressions; `kind` selects which fields matter.
// Children live in `args` (operands, call arguments, vector elements).
struct Expr {
  enum class Kind {
    kNumber,   // number
    kLocal,    // name
    kObs,      // name[index], name == observation parameter
    kElem,     // name[index], local vector element
    kVector,   // [args...]
    kNeg,      // -args[0]
    kNot,      // not args[0]
    kBinary,   // args[0] bin_op args[1]
    kCompare,  // args[0] cmp_op args[1]
    kLogic,    // args[0] logic_op args[1]
    kCall,     // intrinsic(args...)
  };

  Kind kind;
  double number = 0.0;
  std::string name;
  int slot = -1;   // kLocal/kElem: local slot id
  int index = -1;  // kObs/kElem: element index (integer literal)
  BinOp bin_op = BinOp::kAdd;
  CmpOp cmp_op = CmpOp::kLt;
  LogicOp logic_op = LogicOp::kAnd;
  Intrinsic intrinsic = Intrinsic::kAbs;
  std::vector<ExprPtr> args;
  int line = 0, col = 0;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Branch {
  ExprPtr cond;
  std::vector<StmtPtr> body;
};

struct Stmt {
  enum class Kind {
    kAssign,      // target = value
    kElemAssign,  // target[index] = value
    kIf,          // branches (if/elif...) + optional else body
    kReturn,      // return value
  };

  Kind kind;
  std::string target;
  int slot = -1;
  int index = -1;
  ExprPtr value;
  std::vector<Branch> branches;
  std::vector<StmtPtr> else_body;
  bool has_else = false;
  int line = 0, col = 0;
};

// A parsed, validated candidate policy. Immutable after parse; safe to share
// across rollout workers.
struct PolicyProgram {
  std::string name;    // function name as parsed (canonically "policy")
  std::string param;   // observation parameter name
  std::string docstring;
  bool has_docstring = false;
  std::vector<StmtPtr> body;
  int obs_dim = 0;
  int action_dim = 0;
  int num_slots = 0;   // local variable slot count
  std::string source;  // the exact source text handed to parse()
};

ExprPtr CloneExpr(const Expr& e);
StmtPtr CloneStmt(const Stmt& s);
PolicyProgram ClonePolicyProgram(const PolicyProgram& p);

// Structural equality: node kinds, operators, literal values, variable and
// parameter names, docstring. Source positions and slot numbering ignored.
bool StructurallyEqual(const Expr& a, const Expr& b);
bool StructurallyEqual(const Stmt& a, const Stmt& b);
bool StructurallyEqual(const PolicyProgram& a, const PolicyProgram& b);

}  // namespace evoctl::policy

#endif  // EVOCTL_POLICY_AST_HPP_
