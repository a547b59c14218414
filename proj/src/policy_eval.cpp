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
#include <string>
#include <vector>

#include "evoctl/policy_lang.hpp"

namespace evoctl::policy {
namespace {

// Runtime value: a scalar or a short vector. len == 0 means scalar.
struct Value {
  std::array<double, kMaxVectorLen> v{};
  int len = 0;

  bool IsScalar() const { return len == 0; }
  double Scalar() const { return v[0]; }

  static Value MakeScalar(double x) {
    Value r;
    r.v[0] = x;
    return r;
  }
};

[[noreturn]] void Abort(EvalErrorKind kind, const std::string& msg, int line, int col) {
  throw EvalError(kind, std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

class Interpreter {
 public:
  Interpreter(const PolicyProgram& p, std::span<const double> obs, const SandboxLimits& limits)
      : program_(p), obs_(obs), limits_(limits), budget_(limits.max_ops_per_call) {
    locals_.resize(static_cast<size_t>(p.num_slots));
    defined_.assign(static_cast<size_t>(p.num_slots), false);
  }

  Action Run() {
    Value ret;
    if (!ExecBlock(program_.body, &ret)) {
      Abort(EvalErrorKind::kRuntime, "policy finished without executing a return", 1, 1);
    }
    Action a;
    if (program_.action_dim == 1) {
      if (!ret.IsScalar()) {
        Abort(EvalErrorKind::kRuntime,
              "policy must return a scalar action (returned a vector)", 1, 1);
      }
      a.dim = 1;
      a.values[0] = Clamp(ret.Scalar());
    } else {
      if (ret.IsScalar() || ret.len != program_.action_dim) {
        Abort(EvalErrorKind::kRuntime,
              "policy must return a vector of " + std::to_string(program_.action_dim) +
                  " actions",
              1, 1);
      }
      a.dim = ret.len;
      for (int i = 0; i < ret.len; ++i) a.values[static_cast<size_t>(i)] = Clamp(ret.v[static_cast<size_t>(i)]);
    }
    return a;
  }

 private:
  static double Clamp(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

  void Charge(const int line, const int col) {
    if (--budget_ < 0) {
      Abort(EvalErrorKind::kBudget, "evaluation op budget exceeded", line, col);
    }
  }

  void GuardScalar(double x, int line, int col) {
    if (!std::isfinite(x) || std::fabs(x) > limits_.max_abs_value) {
      Abort(EvalErrorKind::kNonFinite, "non-finite or out-of-range intermediate value", line,
            col);
    }
  }

  void Guard(const Value& value, int line, int col) {
    if (value.IsScalar()) {
      GuardScalar(value.v[0], line, col);
    } else {
      for (int i = 0; i < value.len; ++i) GuardScalar(value.v[static_cast<size_t>(i)], line, col);
    }
  }

  // Returns true when a return statement fired; *ret holds its value.
  bool ExecBlock(const std::vector<StmtPtr>& body, Value* ret) {
    for (const auto& s : body) {
      if (ExecStmt(*s, ret)) return true;
    }
    return false;
  }

  bool ExecStmt(const Stmt& s, Value* ret) {
    Charge(s.line, s.col);
    switch (s.kind) {
      case Stmt::Kind::kAssign: {
        locals_[static_cast<size_t>(s.slot)] = Eval(*s.value);
        defined_[static_cast<size_t>(s.slot)] = true;
        return false;
      }
      case Stmt::Kind::kElemAssign: {
        Value rhs = Eval(*s.value);
        if (!rhs.IsScalar()) {
          Abort(EvalErrorKind::kRuntime, "element assignment needs a scalar value", s.line,
                s.col);
        }
        if (!defined_[static_cast<size_t>(s.slot)]) {
          Abort(EvalErrorKind::kRuntime, "variable '" + s.target + "' used before assignment",
                s.line, s.col);
        }
        Value& target = locals_[static_cast<size_t>(s.slot)];
        if (target.IsScalar() || s.index >= target.len) {
          Abort(EvalErrorKind::kRuntime,
                "element index " + std::to_string(s.index) + " invalid for '" + s.target + "'",
                s.line, s.col);
        }
        target.v[static_cast<size_t>(s.index)] = rhs.Scalar();
        return false;
      }
      case Stmt::Kind::kReturn:
        *ret = Eval(*s.value);
        return true;
      case Stmt::Kind::kIf: {
        for (const auto& b : s.branches) {
          if (Truthy(Eval(*b.cond), b.cond->line, b.cond->col)) {
            return ExecBlock(b.body, ret);
          }
        }
        if (s.has_else) return ExecBlock(s.else_body, ret);
        return false;
      }
    }
    return false;
  }

  bool Truthy(const Value& v, int line, int col) {
    if (!v.IsScalar()) {
      Abort(EvalErrorKind::kRuntime, "condition must be a scalar", line, col);
    }
    return v.Scalar() != 0.0;
  }

  Value Eval(const Expr& e) {
    Charge(e.line, e.col);
    switch (e.kind) {
      case Expr::Kind::kNumber:
        return Value::MakeScalar(e.number);
      case Expr::Kind::kLocal: {
        if (!defined_[static_cast<size_t>(e.slot)]) {
          Abort(EvalErrorKind::kRuntime, "variable '" + e.name + "' used before assignment",
                e.line, e.col);
        }
        return locals_[static_cast<size_t>(e.slot)];
      }
      case Expr::Kind::kObs:
        return Value::MakeScalar(obs_[static_cast<size_t>(e.index)]);
      case Expr::Kind::kElem: {
        if (!defined_[static_cast<size_t>(e.slot)]) {
          Abort(EvalErrorKind::kRuntime, "variable '" + e.name + "' used before assignment",
                e.line, e.col);
        }
        const Value& base = locals_[static_cast<size_t>(e.slot)];
        if (base.IsScalar() || e.index >= base.len) {
          Abort(EvalErrorKind::kRuntime,
                "element index " + std::to_string(e.index) + " invalid for '" + e.name + "'",
                e.line, e.col);
        }
        return Value::MakeScalar(base.v[static_cast<size_t>(e.index)]);
      }
      case Expr::Kind::kVector: {
        Value r;
        r.len = static_cast<int>(e.args.size());
        for (size_t i = 0; i < e.args.size(); ++i) {
          Value x = Eval(*e.args[i]);
          if (!x.IsScalar()) {
            Abort(EvalErrorKind::kRuntime, "vector elements must be scalars", e.line, e.col);
          }
          r.v[i] = x.Scalar();
        }
        return r;
      }
      case Expr::Kind::kNeg: {
        Value x = Eval(*e.args[0]);
        return MapUnary(x, [](double a) { return -a; }, e);
      }
      case Expr::Kind::kNot: {
        Value x = Eval(*e.args[0]);
        return Value::MakeScalar(Truthy(x, e.line, e.col) ? 0.0 : 1.0);
      }
      case Expr::Kind::kBinary: {
        Value a = Eval(*e.args[0]);
        Value b = Eval(*e.args[1]);
        switch (e.bin_op) {
          case BinOp::kAdd: return MapBinary(a, b, [](double x, double y) { return x + y; }, e);
          case BinOp::kSub: return MapBinary(a, b, [](double x, double y) { return x - y; }, e);
          case BinOp::kMul: return MapBinary(a, b, [](double x, double y) { return x * y; }, e);
          case BinOp::kDiv: return MapBinary(a, b, [](double x, double y) { return x / y; }, e);
        }
        break;
      }
      case Expr::Kind::kCompare: {
        Value a = Eval(*e.args[0]);
        Value b = Eval(*e.args[1]);
        if (!a.IsScalar() || !b.IsScalar()) {
          Abort(EvalErrorKind::kRuntime, "comparison operands must be scalars", e.line, e.col);
        }
        double x = a.Scalar(), y = b.Scalar();
        bool r = false;
        switch (e.cmp_op) {
          case CmpOp::kLt: r = x < y; break;
          case CmpOp::kLe: r = x <= y; break;
          case CmpOp::kGt: r = x > y; break;
          case CmpOp::kGe: r = x >= y; break;
          case CmpOp::kEq: r = x == y; break;
          case CmpOp::kNe: r = x != y; break;
        }
        return Value::MakeScalar(r ? 1.0 : 0.0);
      }
      case Expr::Kind::kLogic: {
        // Short-circuit; result is 0/1.
        bool lhs = Truthy(Eval(*e.args[0]), e.line, e.col);
        if (e.logic_op == LogicOp::kAnd) {
          if (!lhs) return Value::MakeScalar(0.0);
          return Value::MakeScalar(Truthy(Eval(*e.args[1]), e.line, e.col) ? 1.0 : 0.0);
        }
        if (lhs) return Value::MakeScalar(1.0);
        return Value::MakeScalar(Truthy(Eval(*e.args[1]), e.line, e.col) ? 1.0 : 0.0);
      }
      case Expr::Kind::kCall:
        return EvalCall(e);
    }
    Abort(EvalErrorKind::kRuntime, "internal: unhandled expression", e.line, e.col);
  }

  template <typename F>
  Value MapUnary(const Value& a, F f, const Expr& e) {
    Value r;
    if (a.IsScalar()) {
      r.v[0] = f(a.Scalar());
    } else {
      r.len = a.len;
      for (int i = 0; i < a.len; ++i) r.v[static_cast<size_t>(i)] = f(a.v[static_cast<size_t>(i)]);
    }
    Guard(r, e.line, e.col);
    return r;
  }

  // numpy-style broadcasting between scalars and equal-length vectors.
  template <typename F>
  Value MapBinary(const Value& a, const Value& b, F f, const Expr& e) {
    Value r;
    if (a.IsScalar() && b.IsScalar()) {
      r.v[0] = f(a.Scalar(), b.Scalar());
    } else if (!a.IsScalar() && !b.IsScalar()) {
      if (a.len != b.len) {
        Abort(EvalErrorKind::kRuntime, "vector length mismatch", e.line, e.col);
      }
      r.len = a.len;
      for (int i = 0; i < a.len; ++i) {
        r.v[static_cast<size_t>(i)] = f(a.v[static_cast<size_t>(i)], b.v[static_cast<size_t>(i)]);
      }
    } else {
      const Value& vec = a.IsScalar() ? b : a;
      const double s = a.IsScalar() ? a.Scalar() : b.Scalar();
      const bool scalar_left = a.IsScalar();
      r.len = vec.len;
      for (int i = 0; i < vec.len; ++i) {
        const double x = vec.v[static_cast<size_t>(i)];
        r.v[static_cast<size_t>(i)] = scalar_left ? f(s, x) : f(x, s);
      }
    }
    Guard(r, e.line, e.col);
    return r;
  }

  Value EvalCall(const Expr& e) {
    switch (e.intrinsic) {
      case Intrinsic::kAbs:
        return MapUnary(Eval(*e.args[0]), [](double x) { return std::fabs(x); }, e);
      case Intrinsic::kSign:
        return MapUnary(Eval(*e.args[0]),
                        [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }, e);
      case Intrinsic::kSin:
        return MapUnary(Eval(*e.args[0]), [](double x) { return std::sin(x); }, e);
      case Intrinsic::kCos:
        return MapUnary(Eval(*e.args[0]), [](double x) { return std::cos(x); }, e);
      case Intrinsic::kTan:
        return MapUnary(Eval(*e.args[0]), [](double x) { return std::tan(x); }, e);
      case Intrinsic::kAtan2: {
        Value a = Eval(*e.args[0]);
        Value b = Eval(*e.args[1]);
        return MapBinary(a, b, [](double y, double x) { return std::atan2(y, x); }, e);
      }
      case Intrinsic::kSqrt:
        return MapUnary(Eval(*e.args[0]), [](double x) { return std::sqrt(x); }, e);
      case Intrinsic::kExp:
        return MapUnary(Eval(*e.args[0]), [](double x) { return std::exp(x); }, e);
      case Intrinsic::kTanh:
        return MapUnary(Eval(*e.args[0]), [](double x) { return std::tanh(x); }, e);
      case Intrinsic::kMin: {
        Value a = Eval(*e.args[0]);
        Value b = Eval(*e.args[1]);
        return MapBinary(a, b, [](double x, double y) { return x < y ? x : y; }, e);
      }
      case Intrinsic::kMax: {
        Value a = Eval(*e.args[0]);
        Value b = Eval(*e.args[1]);
        return MapBinary(a, b, [](double x, double y) { return x > y ? x : y; }, e);
      }
      case Intrinsic::kClip: {
        Value x = Eval(*e.args[0]);
        Value lo = Eval(*e.args[1]);
        Value hi = Eval(*e.args[2]);
        if (!lo.IsScalar() || !hi.IsScalar()) {
          Abort(EvalErrorKind::kRuntime, "clip bounds must be scalars", e.line, e.col);
        }
        const double l = lo.Scalar(), h = hi.Scalar();
        return MapUnary(x, [l, h](double v) { return v < l ? l : (v > h ? h : v); }, e);
      }
      case Intrinsic::kFloor:
        return MapUnary(Eval(*e.args[0]), [](double x) { return std::floor(x); }, e);
    }
    Abort(EvalErrorKind::kRuntime, "internal: unhandled intrinsic", e.line, e.col);
  }

  const PolicyProgram& program_;
  std::span<const double> obs_;
  const SandboxLimits& limits_;
  std::vector<Value> locals_;
  std::vector<char> defined_;
  int64_t budget_;
};

}  // namespace

const char* EvalErrorKindName(EvalErrorKind k) {
  switch (k) {
    case EvalErrorKind::kRuntime: return "runtime_error";
    case EvalErrorKind::kNonFinite: return "nonfinite";
    case EvalErrorKind::kBudget: return "budget_exceeded";
  }
  return "?";
}

Action EvalPolicy(const PolicyProgram& program, std::span<const double> obs,
                  const SandboxLimits& limits) {
  if (static_cast<int>(obs.size()) != program.obs_dim) {
    throw EvalError(EvalErrorKind::kRuntime, "observation size mismatch");
  }
  for (double x : obs) {
    if (!std::isfinite(x)) {
      throw EvalError(EvalErrorKind::kRuntime, "non-finite observation");
    }
  }
  Interpreter interp(program, obs, limits);
  return interp.Run();
}

}  // namespace evoctl::policy
