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

#include "evoctl/policy_ast.hpp"

namespace evoctl::policy {

ExprPtr CloneExpr(const Expr& e) {
  auto c = std::make_unique<Expr>();
  c->kind = e.kind;
  c->number = e.number;
  c->name = e.name;
  c->slot = e.slot;
  c->index = e.index;
  c->bin_op = e.bin_op;
  c->cmp_op = e.cmp_op;
  c->logic_op = e.logic_op;
  c->intrinsic = e.intrinsic;
  c->line = e.line;
  c->col = e.col;
  c->args.reserve(e.args.size());
  for (const auto& a : e.args) c->args.push_back(CloneExpr(*a));
  return c;
}

StmtPtr CloneStmt(const Stmt& s) {
  auto c = std::make_unique<Stmt>();
  c->kind = s.kind;
  c->target = s.target;
  c->slot = s.slot;
  c->index = s.index;
  c->has_else = s.has_else;
  c->line = s.line;
  c->col = s.col;
  if (s.value) c->value = CloneExpr(*s.value);
  c->branches.reserve(s.branches.size());
  for (const auto& b : s.branches) {
    Branch nb;
    nb.cond = CloneExpr(*b.cond);
    nb.body.reserve(b.body.size());
    for (const auto& st : b.body) nb.body.push_back(CloneStmt(*st));
    c->branches.push_back(std::move(nb));
  }
  c->else_body.reserve(s.else_body.size());
  for (const auto& st : s.else_body) c->else_body.push_back(CloneStmt(*st));
  return c;
}

PolicyProgram ClonePolicyProgram(const PolicyProgram& p) {
  PolicyProgram c;
  c.name = p.name;
  c.param = p.param;
  c.docstring = p.docstring;
  c.has_docstring = p.has_docstring;
  c.obs_dim = p.obs_dim;
  c.action_dim = p.action_dim;
  c.num_slots = p.num_slots;
  c.source = p.source;
  c.body.reserve(p.body.size());
  for (const auto& s : p.body) c.body.push_back(CloneStmt(*s));
  return c;
}

bool StructurallyEqual(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Expr::Kind::kNumber:
      if (a.number != b.number) return false;
      break;
    case Expr::Kind::kLocal:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::kObs:
      if (a.index != b.index) return false;
      break;
    case Expr::Kind::kElem:
      if (a.name != b.name || a.index != b.index) return false;
      break;
    case Expr::Kind::kBinary:
      if (a.bin_op != b.bin_op) return false;
      break;
    case Expr::Kind::kCompare:
      if (a.cmp_op != b.cmp_op) return false;
      break;
    case Expr::Kind::kLogic:
      if (a.logic_op != b.logic_op) return false;
      break;
    case Expr::Kind::kCall:
      if (a.intrinsic != b.intrinsic) return false;
      break;
    default:
      break;
  }
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!StructurallyEqual(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

bool StructurallyEqual(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::kAssign:
      return a.target == b.target && StructurallyEqual(*a.value, *b.value);
    case Stmt::Kind::kElemAssign:
      return a.target == b.target && a.index == b.index &&
             StructurallyEqual(*a.value, *b.value);
    case Stmt::Kind::kReturn:
      return StructurallyEqual(*a.value, *b.value);
    case Stmt::Kind::kIf: {
      if (a.branches.size() != b.branches.size() || a.has_else != b.has_else ||
          a.else_body.size() != b.else_body.size()) {
        return false;
      }
      for (size_t i = 0; i < a.branches.size(); ++i) {
        const auto& ba = a.branches[i];
        const auto& bb = b.branches[i];
        if (!StructurallyEqual(*ba.cond, *bb.cond) || ba.body.size() != bb.body.size()) {
          return false;
        }
        for (size_t j = 0; j < ba.body.size(); ++j) {
          if (!StructurallyEqual(*ba.body[j], *bb.body[j])) return false;
        }
      }
      for (size_t j = 0; j < a.else_body.size(); ++j) {
        if (!StructurallyEqual(*a.else_body[j], *b.else_body[j])) return false;
      }
      return true;
    }
  }
  return false;
}

bool StructurallyEqual(const PolicyProgram& a, const PolicyProgram& b) {
  if (a.name != b.name || a.param != b.param || a.has_docstring != b.has_docstring ||
      a.docstring != b.docstring || a.body.size() != b.body.size()) {
    return false;
  }
  for (size_t i = 0; i < a.body.size(); ++i) {
    if (!StructurallyEqual(*a.body[i], *b.body[i])) return false;
  }
  return true;
}

}  // namespace evoctl::policy
