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

#include <charconv>
#include <string>

#include "evoctl/policy_lang.hpp"

namespace evoctl::policy {
namespace {

// Shortest decimal text that round-trips the double.
std::string NumberText(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// Precedence levels, loosest first: or < and < not < comparison < add < mul
// < unary < atom.
enum Prec {
  kPrecOr = 1,
  kPrecAnd,
  kPrecNot,
  kPrecCmp,
  kPrecAdd,
  kPrecMul,
  kPrecUnary,
  kPrecAtom,
};

int PrecOf(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kLogic:
      return e.logic_op == LogicOp::kOr ? kPrecOr : kPrecAnd;
    case Expr::Kind::kNot:
      return kPrecNot;
    case Expr::Kind::kCompare:
      return kPrecCmp;
    case Expr::Kind::kBinary:
      return (e.bin_op == BinOp::kAdd || e.bin_op == BinOp::kSub) ? kPrecAdd : kPrecMul;
    case Expr::Kind::kNeg:
      return kPrecUnary;
    default:
      return kPrecAtom;
  }
}

const char* CmpText(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
    case CmpOp::kEq: return "==";
    case CmpOp::kNe: return "!=";
  }
  return "?";
}

class Printer {
 public:
  explicit Printer(const PolicyProgram& p) : program_(p) {}

  std::string Run(std::string_view rename) {
    out_.clear();
    std::string name = rename.empty() ? program_.name : std::string(rename);
    out_ += "def " + name + "(" + program_.param + ": np.ndarray) -> ";
    out_ += program_.action_dim == 1 ? "float" : "np.ndarray";
    out_ += ":\n";
    if (program_.has_docstring) {
      out_ += "  \"\"\"" + program_.docstring + "\"\"\"\n";
    }
    PrintStmts(program_.body, 1);
    return out_;
  }

 private:
  void Indent(int depth) { out_.append(static_cast<size_t>(depth) * 2, ' '); }

  void PrintStmts(const std::vector<StmtPtr>& body, int depth) {
    for (const auto& s : body) PrintStmt(*s, depth);
  }

  void PrintStmt(const Stmt& s, int depth) {
    switch (s.kind) {
      case Stmt::Kind::kAssign:
        Indent(depth);
        out_ += s.target + " = ";
        PrintExpr(*s.value, 0);
        out_ += '\n';
        break;
      case Stmt::Kind::kElemAssign:
        Indent(depth);
        out_ += s.target + "[" + std::to_string(s.index) + "] = ";
        PrintExpr(*s.value, 0);
        out_ += '\n';
        break;
      case Stmt::Kind::kReturn:
        Indent(depth);
        out_ += "return ";
        PrintExpr(*s.value, 0);
        out_ += '\n';
        break;
      case Stmt::Kind::kIf: {
        for (size_t i = 0; i < s.branches.size(); ++i) {
          Indent(depth);
          out_ += i == 0 ? "if " : "elif ";
          PrintExpr(*s.branches[i].cond, 0);
          out_ += ":\n";
          PrintStmts(s.branches[i].body, depth + 1);
        }
        if (s.has_else) {
          Indent(depth);
          out_ += "else:\n";
          PrintStmts(s.else_body, depth + 1);
        }
        break;
      }
    }
  }

  // `min_prec` is the loosest precedence printable without parentheses.
  void PrintExpr(const Expr& e, int min_prec) {
    const int prec = PrecOf(e);
    const bool parens = prec < min_prec;
    if (parens) out_ += '(';
    switch (e.kind) {
      case Expr::Kind::kNumber:
        out_ += NumberText(e.number);
        break;
      case Expr::Kind::kLocal:
        out_ += e.name;
        break;
      case Expr::Kind::kObs:
        out_ += program_.param + "[" + std::to_string(e.index) + "]";
        break;
      case Expr::Kind::kElem:
        out_ += e.name + "[" + std::to_string(e.index) + "]";
        break;
      case Expr::Kind::kVector:
        out_ += '[';
        for (size_t i = 0; i < e.args.size(); ++i) {
          if (i) out_ += ", ";
          PrintExpr(*e.args[i], 0);
        }
        out_ += ']';
        break;
      case Expr::Kind::kNeg:
        out_ += '-';
        PrintExpr(*e.args[0], kPrecUnary);
        break;
      case Expr::Kind::kNot:
        out_ += "not ";
        PrintExpr(*e.args[0], kPrecNot);
        break;
      case Expr::Kind::kBinary: {
        // Left associative: the right operand needs one level tighter.
        switch (e.bin_op) {
          case BinOp::kAdd:
            PrintExpr(*e.args[0], kPrecAdd);
            out_ += " + ";
            PrintExpr(*e.args[1], kPrecAdd + 1);
            break;
          case BinOp::kSub:
            PrintExpr(*e.args[0], kPrecAdd);
            out_ += " - ";
            PrintExpr(*e.args[1], kPrecAdd + 1);
            break;
          case BinOp::kMul:
            PrintExpr(*e.args[0], kPrecMul);
            out_ += "*";
            PrintExpr(*e.args[1], kPrecMul + 1);
            break;
          case BinOp::kDiv:
            PrintExpr(*e.args[0], kPrecMul);
            out_ += "/";
            PrintExpr(*e.args[1], kPrecMul + 1);
            break;
        }
        break;
      }
      case Expr::Kind::kCompare:
        PrintExpr(*e.args[0], kPrecCmp + 1);
        out_ += ' ';
        out_ += CmpText(e.cmp_op);
        out_ += ' ';
        PrintExpr(*e.args[1], kPrecCmp + 1);
        break;
      case Expr::Kind::kLogic:
        if (e.logic_op == LogicOp::kAnd) {
          PrintExpr(*e.args[0], kPrecAnd);
          out_ += " and ";
          PrintExpr(*e.args[1], kPrecAnd + 1);
        } else {
          PrintExpr(*e.args[0], kPrecOr);
          out_ += " or ";
          PrintExpr(*e.args[1], kPrecOr + 1);
        }
        break;
      case Expr::Kind::kCall:
        out_ += IntrinsicName(e.intrinsic);
        out_ += '(';
        for (size_t i = 0; i < e.args.size(); ++i) {
          if (i) out_ += ", ";
          PrintExpr(*e.args[i], 0);
        }
        out_ += ')';
        break;
    }
    if (parens) out_ += ')';
  }

  const PolicyProgram& program_;
  std::string out_;
};

}  // namespace

std::string PrettyPrint(const PolicyProgram& p, std::string_view rename) {
  return Printer(p).Run(rename);
}

}  // namespace evoctl::policy
