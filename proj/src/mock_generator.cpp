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

#include <cmath>
#include <vector>

#include "evoctl/generation.hpp"
#include "evoctl/policy_lang.hpp"

namespace evoctl::gen {
namespace {

using policy::Expr;
using policy::ExprPtr;
using policy::PolicyProgram;
using policy::Stmt;

// Mutable views into a cloned program, refreshed after every edit.
struct NodeIndex {
  std::vector<Expr*> numbers;            // literal perturbation targets
  std::vector<Expr*> compares;           // comparison flips
  std::vector<Expr*> threshold_numbers;  // literals inside if/elif conditions
  std::vector<Expr*> graft_targets;      // replaceable scalar-ish expressions
};

void WalkExpr(Expr* e, bool in_condition, NodeIndex* idx) {
  switch (e->kind) {
    case Expr::Kind::kNumber:
      idx->numbers.push_back(e);
      if (in_condition) idx->threshold_numbers.push_back(e);
      break;
    case Expr::Kind::kCompare:
      idx->compares.push_back(e);
      break;
    default:
      break;
  }
  if (e->kind != Expr::Kind::kVector) idx->graft_targets.push_back(e);
  for (auto& a : e->args) WalkExpr(a.get(), in_condition, idx);
}

void WalkStmts(std::vector<policy::StmtPtr>& body, NodeIndex* idx) {
  for (auto& s : body) {
    switch (s->kind) {
      case Stmt::Kind::kAssign:
      case Stmt::Kind::kElemAssign:
      case Stmt::Kind::kReturn:
        WalkExpr(s->value.get(), false, idx);
        break;
      case Stmt::Kind::kIf:
        for (auto& b : s->branches) {
          WalkExpr(b.cond.get(), true, idx);
          WalkStmts(b.body, idx);
        }
        WalkStmts(s->else_body, idx);
        break;
    }
  }
}

NodeIndex Index(PolicyProgram* p) {
  NodeIndex idx;
  WalkStmts(p->body, &idx);
  return idx;
}

// Closed subtrees: no local references, no vectors; safe to graft anywhere.
bool IsClosedScalar(const Expr& e) {
  if (e.kind == Expr::Kind::kLocal || e.kind == Expr::Kind::kElem ||
      e.kind == Expr::Kind::kVector) {
    return false;
  }
  for (const auto& a : e.args) {
    if (!IsClosedScalar(*a)) return false;
  }
  return true;
}

void CollectDonors(const Expr& e, std::vector<const Expr*>* out) {
  if (IsClosedScalar(e)) {
    out->push_back(&e);
  } else {
    for (const auto& a : e.args) CollectDonors(*a, out);
  }
}

void CollectDonors(const std::vector<policy::StmtPtr>& body, std::vector<const Expr*>* out) {
  for (const auto& s : body) {
    switch (s->kind) {
      case Stmt::Kind::kAssign:
      case Stmt::Kind::kElemAssign:
      case Stmt::Kind::kReturn:
        CollectDonors(*s->value, out);
        break;
      case Stmt::Kind::kIf:
        for (const auto& b : s->branches) {
          CollectDonors(*b.cond, out);
          CollectDonors(b.body, out);
        }
        CollectDonors(s->else_body, out);
        break;
    }
  }
}

Expr MakeNumber(double v) {
  Expr e;
  e.kind = Expr::Kind::kNumber;
  e.number = v;
  return e;
}

Expr MakeObsRef(int index) {
  Expr e;
  e.kind = Expr::Kind::kObs;
  e.index = index;
  return e;
}

bool PerturbLiteral(Rng& rng, const NodeIndex& idx) {
  if (idx.numbers.empty()) return false;
  Expr* target = idx.numbers[rng.UniformInt(idx.numbers.size())];
  static constexpr double kFactors[] = {0.5, 0.9, 1.1, 2.0};
  static constexpr double kDeltas[] = {-1.0, -0.1, 0.1, 1.0};
  double v = target->number;
  if (rng.UniformInt(2) == 0) {
    v *= kFactors[rng.UniformInt(4)];
  } else {
    v += kDeltas[rng.UniformInt(4)];
  }
  if (!std::isfinite(v) || std::fabs(v) > 1e9) return false;
  target->number = v;
  return true;
}

bool FlipComparison(Rng& rng, const NodeIndex& idx) {
  if (idx.compares.empty()) return false;
  Expr* target = idx.compares[rng.UniformInt(idx.compares.size())];
  using policy::CmpOp;
  switch (target->cmp_op) {
    case CmpOp::kLt: target->cmp_op = CmpOp::kGt; break;
    case CmpOp::kGt: target->cmp_op = CmpOp::kLt; break;
    case CmpOp::kLe: target->cmp_op = CmpOp::kGe; break;
    case CmpOp::kGe: target->cmp_op = CmpOp::kLe; break;
    case CmpOp::kEq: target->cmp_op = CmpOp::kNe; break;
    case CmpOp::kNe: target->cmp_op = CmpOp::kEq; break;
  }
  return true;
}

bool NudgeThreshold(Rng& rng, const NodeIndex& idx) {
  if (idx.threshold_numbers.empty()) return false;
  Expr* target = idx.threshold_numbers[rng.UniformInt(idx.threshold_numbers.size())];
  const double delta = rng.UniformInt(2) == 0 ? -0.1 : 0.1;
  const double v = target->number + delta;
  if (!std::isfinite(v)) return false;
  target->number = v;
  return true;
}

bool Graft(Rng& rng, const NodeIndex& idx, const std::vector<const Expr*>& donors) {
  if (idx.graft_targets.empty() || donors.empty()) return false;
  Expr* target = idx.graft_targets[rng.UniformInt(idx.graft_targets.size())];
  const Expr* donor = donors[rng.UniformInt(donors.size())];
  ExprPtr clone = policy::CloneExpr(*donor);
  *target = std::move(*clone);
  return true;
}

bool WrapInClip(Rng& rng, const NodeIndex& idx) {
  if (idx.graft_targets.empty()) return false;
  Expr* target = idx.graft_targets[rng.UniformInt(idx.graft_targets.size())];
  if (target->kind == Expr::Kind::kCall && target->intrinsic == policy::Intrinsic::kClip) {
    return false;  // avoid stacking clip(clip(...))
  }
  Expr call;
  call.kind = Expr::Kind::kCall;
  call.intrinsic = policy::Intrinsic::kClip;
  call.args.push_back(policy::CloneExpr(*target));
  call.args.push_back(std::make_unique<Expr>(MakeNumber(-1.0)));
  call.args.push_back(std::make_unique<Expr>(MakeNumber(1.0)));
  *target = std::move(call);
  return true;
}

// Observation injection: the one edit that introduces fresh state
// dependence, without which a constant starter could never evolve a
// feedback policy.
bool InjectObs(Rng& rng, const NodeIndex& idx, int obs_dim) {
  if (idx.numbers.empty()) return false;
  Expr* target = idx.numbers[rng.UniformInt(idx.numbers.size())];
  const int i = static_cast<int>(rng.UniformInt(static_cast<uint64_t>(obs_dim)));
  switch (rng.UniformInt(3)) {
    case 0: {  // sign(obs[i])
      Expr call;
      call.kind = Expr::Kind::kCall;
      call.intrinsic = policy::Intrinsic::kSign;
      call.args.push_back(std::make_unique<Expr>(MakeObsRef(i)));
      *target = std::move(call);
      return true;
    }
    case 1: {  // obs[i]
      *target = MakeObsRef(i);
      return true;
    }
    default: {  // c * obs[i]
      static constexpr double kGains[] = {-5.0, -1.0, 1.0, 5.0};
      Expr mul;
      mul.kind = Expr::Kind::kBinary;
      mul.bin_op = policy::BinOp::kMul;
      mul.args.push_back(std::make_unique<Expr>(MakeNumber(kGains[rng.UniformInt(4)])));
      mul.args.push_back(std::make_unique<Expr>(MakeObsRef(i)));
      *target = std::move(mul);
      return true;
    }
  }
}

}  // namespace

CandidateBatch GenerateMock(const PolicyProgram& low, const PolicyProgram& high, Rng& rng,
                            int n) {
  CandidateBatch batch;
  batch.generator_id = "mock";

  std::vector<const Expr*> donors;
  CollectDonors(low.body, &donors);

  for (int c = 0; c < n; ++c) {
    PolicyProgram mutant = policy::ClonePolicyProgram(high);
    const int edits = 1 + static_cast<int>(rng.UniformInt(2));
    for (int e = 0; e < edits; ++e) {
      NodeIndex idx = Index(&mutant);
      bool applied = false;
      for (int attempt = 0; attempt < 8 && !applied; ++attempt) {
        switch (rng.UniformInt(6)) {
          case 0: applied = PerturbLiteral(rng, idx); break;
          case 1: applied = FlipComparison(rng, idx); break;
          case 2: applied = NudgeThreshold(rng, idx); break;
          case 3: applied = Graft(rng, idx, donors); break;
          case 4: applied = WrapInClip(rng, idx); break;
          default: applied = InjectObs(rng, idx, high.obs_dim); break;
        }
      }
    }
    std::string source = policy::PrettyPrint(mutant);
    try {
      policy::Parse(source, high.obs_dim, high.action_dim);
    } catch (const policy::ParseError&) {
      // By construction this should be unreachable; fall back to the parent
      // so the batch never carries an unparseable candidate.
      source = policy::PrettyPrint(high);
    }
    batch.sources.push_back(std::move(source));
  }
  return batch;
}

}  // namespace evoctl::gen
