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
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evoctl/policy_lang.hpp"

namespace evoctl::policy {
namespace {

constexpr size_t kMaxSourceBytes = 1 << 20;
constexpr int kMaxNestingDepth = 200;

enum class Tok {
  kEnd, kNewline, kIndent, kDedent,
  kName, kNumber, kString,
  kDef, kReturn, kIf, kElif, kElse, kAnd, kOr, kNot,
  kLParen, kRParen, kLBracket, kRBracket,
  kComma, kColon, kDot, kAssign, kArrow,
  kPlus, kMinus, kStar, kSlash,
  kLt, kLe, kGt, kGe, kEq, kNe,
};

struct Token {
  Tok kind;
  std::string text;   // kName: identifier; kString: literal body
  double number = 0;  // kNumber
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { indents_.push_back(0); }

  std::vector<Token> Run() {
    std::vector<Token> out;
    while (true) {
      if (at_line_start_ && bracket_depth_ == 0) {
        if (!LexLineStart(&out)) break;
      }
      SkipSpaces();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\n') {
        ++pos_;
        ++line_;
        line_begin_ = pos_;
        if (bracket_depth_ == 0) {
          // Suppress NEWLINE for blank / comment-only lines.
          if (!out.empty() && out.back().kind != Tok::kNewline &&
              out.back().kind != Tok::kIndent && out.back().kind != Tok::kDedent) {
            out.push_back({Tok::kNewline, "", 0, line_ - 1, Col()});
          }
          at_line_start_ = true;
        }
        continue;
      }
      out.push_back(LexToken());
    }
    if (!out.empty() && out.back().kind != Tok::kNewline) {
      out.push_back({Tok::kNewline, "", 0, line_, Col()});
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      out.push_back({Tok::kDedent, "", 0, line_, 1});
    }
    out.push_back({Tok::kEnd, "", 0, line_, Col()});
    return out;
  }

 private:
  int Col() const { return static_cast<int>(pos_ - line_begin_) + 1; }

  void SkipSpaces() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  // Measures indentation of the next logical line and emits INDENT/DEDENT.
  // Returns false at end of input.
  bool LexLineStart(std::vector<Token>* out) {
    while (true) {
      size_t p = pos_;
      int width = 0;
      while (p < src_.size()) {
        if (src_[p] == ' ') {
          ++width;
        } else if (src_[p] == '\t') {
          width += 8 - width % 8;
        } else if (src_[p] == '\r') {
          // ignore
        } else {
          break;
        }
        ++p;
      }
      if (p >= src_.size()) {
        pos_ = p;
        return false;
      }
      if (src_[p] == '\n') {  // blank line
        pos_ = p + 1;
        ++line_;
        line_begin_ = pos_;
        continue;
      }
      if (src_[p] == '#') {  // comment-only line
        while (p < src_.size() && src_[p] != '\n') ++p;
        pos_ = p;
        continue;
      }
      pos_ = p;
      at_line_start_ = false;
      if (width > indents_.back()) {
        indents_.push_back(width);
        out->push_back({Tok::kIndent, "", 0, line_, 1});
      } else {
        while (width < indents_.back()) {
          indents_.pop_back();
          out->push_back({Tok::kDedent, "", 0, line_, 1});
        }
        if (width != indents_.back()) {
          throw ParseError("inconsistent indentation", line_, width + 1);
        }
      }
      return true;
    }
  }

  Token LexToken() {
    const int line = line_;
    const int col = Col();
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      std::string word(src_.substr(start, pos_ - start));
      static const std::map<std::string, Tok> kKeywords = {
          {"def", Tok::kDef},   {"return", Tok::kReturn}, {"if", Tok::kIf},
          {"elif", Tok::kElif}, {"else", Tok::kElse},     {"and", Tok::kAnd},
          {"or", Tok::kOr},     {"not", Tok::kNot},
      };
      auto it = kKeywords.find(word);
      if (it != kKeywords.end()) return {it->second, word, 0, line, col};
      return {Tok::kName, word, 0, line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      return LexNumber(line, col);
    }
    if (c == '"' || c == '\'') return LexString(line, col);

    auto two = [&](char a, char b) {
      return src_[pos_] == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (two('-', '>')) { pos_ += 2; return {Tok::kArrow, "->", 0, line, col}; }
    if (two('<', '=')) { pos_ += 2; return {Tok::kLe, "<=", 0, line, col}; }
    if (two('>', '=')) { pos_ += 2; return {Tok::kGe, ">=", 0, line, col}; }
    if (two('=', '=')) { pos_ += 2; return {Tok::kEq, "==", 0, line, col}; }
    if (two('!', '=')) { pos_ += 2; return {Tok::kNe, "!=", 0, line, col}; }
    ++pos_;
    switch (c) {
      case '(': ++bracket_depth_; return {Tok::kLParen, "(", 0, line, col};
      case ')': --bracket_depth_; return {Tok::kRParen, ")", 0, line, col};
      case '[': ++bracket_depth_; return {Tok::kLBracket, "[", 0, line, col};
      case ']': --bracket_depth_; return {Tok::kRBracket, "]", 0, line, col};
      case ',': return {Tok::kComma, ",", 0, line, col};
      case ':': return {Tok::kColon, ":", 0, line, col};
      case '.': return {Tok::kDot, ".", 0, line, col};
      case '=': return {Tok::kAssign, "=", 0, line, col};
      case '+': return {Tok::kPlus, "+", 0, line, col};
      case '-': return {Tok::kMinus, "-", 0, line, col};
      case '*': return {Tok::kStar, "*", 0, line, col};
      case '/': return {Tok::kSlash, "/", 0, line, col};
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }

  Token LexNumber(int line, int col) {
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' was not an exponent
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError("malformed number '" + text + "'", line, col);
    }
    Token t{Tok::kNumber, text, value, line, col};
    return t;
  }

  Token LexString(int line, int col) {
    char q = src_[pos_];
    bool triple = src_.substr(pos_, 3) == std::string(3, q);
    if (!triple) {
      throw ParseError("string literals other than docstrings are not part of the policy language",
                       line, col);
    }
    pos_ += 3;
    size_t start = pos_;
    const std::string close(3, q);
    size_t end = src_.find(close, pos_);
    if (end == std::string_view::npos) {
      throw ParseError("unterminated docstring", line, col);
    }
    std::string body(src_.substr(start, end - start));
    for (char ch : body) {
      if (ch == '\n') ++line_;
    }
    size_t last_nl = src_.rfind('\n', end);
    if (last_nl != std::string_view::npos && last_nl >= start) line_begin_ = last_nl + 1;
    pos_ = end + 3;
    return {Tok::kString, body, 0, line, col};
  }

  std::string_view src_;
  size_t pos_ = 0;
  size_t line_begin_ = 0;
  int line_ = 1;
  int bracket_depth_ = 0;
  bool at_line_start_ = true;
  std::vector<int> indents_;
};

struct IntrinsicSpec {
  Intrinsic id;
  int arity;
};

// Accepted spellings. A leading "np." or "math." namespace is stripped
// before lookup, so np.sign, math.sin etc. all resolve.
const std::map<std::string, IntrinsicSpec>& IntrinsicTable() {
  static const std::map<std::string, IntrinsicSpec> table = {
      {"abs", {Intrinsic::kAbs, 1}},     {"sign", {Intrinsic::kSign, 1}},
      {"sin", {Intrinsic::kSin, 1}},     {"cos", {Intrinsic::kCos, 1}},
      {"tan", {Intrinsic::kTan, 1}},     {"atan2", {Intrinsic::kAtan2, 2}},
      {"arctan2", {Intrinsic::kAtan2, 2}},
      {"sqrt", {Intrinsic::kSqrt, 1}},   {"exp", {Intrinsic::kExp, 1}},
      {"tanh", {Intrinsic::kTanh, 1}},   {"min", {Intrinsic::kMin, 2}},
      {"max", {Intrinsic::kMax, 2}},     {"clip", {Intrinsic::kClip, 3}},
      {"floor", {Intrinsic::kFloor, 1}},
  };
  return table;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, int obs_dim, int action_dim)
      : toks_(std::move(tokens)), obs_dim_(obs_dim), action_dim_(action_dim) {}

  PolicyProgram Run(std::string_view source) {
    PolicyProgram p;
    p.obs_dim = obs_dim_;
    p.action_dim = action_dim_;
    p.source = std::string(source);

    if (Peek().kind == Tok::kDef) {
      ParseHeader(&p);
      Expect(Tok::kNewline, "newline after function header");
      Expect(Tok::kIndent, "indented function body");
      ParseDocstring(&p);
      while (Peek().kind != Tok::kDedent) p.body.push_back(ParseStatement());
      Advance();  // DEDENT
      if (Peek().kind == Tok::kDef) {
        throw ParseError("exactly one function definition allowed", Peek().line, Peek().col);
      }
      if (Peek().kind != Tok::kEnd) {
        throw ParseError("unexpected trailing content after function body", Peek().line,
                         Peek().col);
      }
    } else {
      // Bare statement body: implicit `def policy(obs):`.
      p.name = "policy";
      p.param = "obs";
      ParseDocstring(&p);
      while (Peek().kind != Tok::kEnd) {
        if (Peek().kind == Tok::kDedent || Peek().kind == Tok::kIndent) {
          throw ParseError("unexpected indentation", Peek().line, Peek().col);
        }
        p.body.push_back(ParseStatement());
      }
    }
    if (p.body.empty()) {
      throw ParseError("empty policy body", Peek().line, Peek().col);
    }
    param_ = p.param;
    Validate(p);
    AssignSlots(&p);
    return p;
  }

 private:
  const Token& Peek(int ahead = 0) const {
    size_t i = pos_ + static_cast<size_t>(ahead);
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  const Token& Advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  const Token& Expect(Tok kind, const char* what) {
    if (Peek().kind != kind) {
      throw ParseError(std::string("expected ") + what, Peek().line, Peek().col);
    }
    return Advance();
  }

  void ParseHeader(PolicyProgram* p) {
    Expect(Tok::kDef, "'def'");
    p->name = Expect(Tok::kName, "function name").text;
    Expect(Tok::kLParen, "'('");
    p->param = Expect(Tok::kName, "parameter name").text;
    if (Peek().kind == Tok::kColon) {  // optional type annotation, ignored
      Advance();
      ParseDottedName();
    }
    if (Peek().kind == Tok::kComma) {
      throw ParseError("policy takes exactly one parameter", Peek().line, Peek().col);
    }
    Expect(Tok::kRParen, "')'");
    if (Peek().kind == Tok::kArrow) {  // optional return annotation, ignored
      Advance();
      ParseDottedName();
    }
    Expect(Tok::kColon, "':' after function header");
  }

  std::string ParseDottedName() {
    std::string name = Expect(Tok::kName, "name").text;
    while (Peek().kind == Tok::kDot) {
      Advance();
      name += '.';
      name += Expect(Tok::kName, "name after '.'").text;
    }
    return name;
  }

  void ParseDocstring(PolicyProgram* p) {
    if (Peek().kind == Tok::kString) {
      p->docstring = Advance().text;
      p->has_docstring = true;
      Expect(Tok::kNewline, "newline after docstring");
    }
  }

  std::vector<StmtPtr> ParseBlock() {
    Expect(Tok::kNewline, "newline before indented block");
    Expect(Tok::kIndent, "indented block");
    std::vector<StmtPtr> body;
    while (Peek().kind != Tok::kDedent) body.push_back(ParseStatement());
    Advance();  // DEDENT
    return body;
  }

  StmtPtr ParseStatement() {
    const Token& t = Peek();
    switch (t.kind) {
      case Tok::kReturn: {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::kReturn;
        s->line = t.line;
        s->col = t.col;
        Advance();
        s->value = ParseExpr();
        Expect(Tok::kNewline, "newline after return");
        return s;
      }
      case Tok::kIf:
        return ParseIf();
      case Tok::kName:
        return ParseAssign();
      default:
        // Reserved words from general Python (while, for, import, ...) land
        // here as plain names only if unknown; keywords we never lex give a
        // direct message instead.
        if (t.kind == Tok::kString) {
          throw ParseError("docstring only allowed as the first statement", t.line, t.col);
        }
        throw ParseError("expected a statement (assignment, if, or return)", t.line, t.col);
    }
  }

  StmtPtr ParseAssign() {
    const Token& name = Advance();
    if (name.text == "while" || name.text == "for" || name.text == "import" ||
        name.text == "lambda" || name.text == "pass") {
      throw ParseError("disallowed construct '" + name.text + "'", name.line, name.col);
    }
    auto s = std::make_unique<Stmt>();
    s->line = name.line;
    s->col = name.col;
    s->target = name.text;
    if (Peek().kind == Tok::kLBracket) {
      Advance();
      const Token& idx = Peek();
      if (idx.kind != Tok::kNumber) {
        throw ParseError("element index must be an integer literal", idx.line, idx.col);
      }
      s->index = IntIndex(idx);
      Advance();
      Expect(Tok::kRBracket, "']'");
      s->kind = Stmt::Kind::kElemAssign;
    } else {
      s->kind = Stmt::Kind::kAssign;
    }
    Expect(Tok::kAssign, "'=' in assignment");
    s->value = ParseExpr();
    Expect(Tok::kNewline, "newline after assignment");
    return s;
  }

  StmtPtr ParseIf() {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::kIf;
    s->line = Peek().line;
    s->col = Peek().col;
    Advance();  // if
    {
      Branch b;
      b.cond = ParseExpr();
      Expect(Tok::kColon, "':' after if condition");
      b.body = ParseBlock();
      s->branches.push_back(std::move(b));
    }
    while (Peek().kind == Tok::kElif) {
      Advance();
      Branch b;
      b.cond = ParseExpr();
      Expect(Tok::kColon, "':' after elif condition");
      b.body = ParseBlock();
      s->branches.push_back(std::move(b));
    }
    if (Peek().kind == Tok::kElse) {
      Advance();
      Expect(Tok::kColon, "':' after else");
      s->else_body = ParseBlock();
      s->has_else = true;
    }
    return s;
  }

  int IntIndex(const Token& t) {
    double v = t.number;
    if (v != std::floor(v) || v < 0 || v > 1e6 || t.text.find('.') != std::string::npos) {
      throw ParseError("index must be a non-negative integer literal", t.line, t.col);
    }
    return static_cast<int>(v);
  }

  ExprPtr ParseExpr() {
    DepthGuard guard(this);
    return ParseOr();
  }

  ExprPtr ParseOr() {
    auto lhs = ParseAnd();
    while (Peek().kind == Tok::kOr) {
      const Token& t = Advance();
      auto e = NewExpr(Expr::Kind::kLogic, t);
      e->logic_op = LogicOp::kOr;
      e->args.push_back(std::move(lhs));
      e->args.push_back(ParseAnd());
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr ParseAnd() {
    auto lhs = ParseNot();
    while (Peek().kind == Tok::kAnd) {
      const Token& t = Advance();
      auto e = NewExpr(Expr::Kind::kLogic, t);
      e->logic_op = LogicOp::kAnd;
      e->args.push_back(std::move(lhs));
      e->args.push_back(ParseNot());
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr ParseNot() {
    if (Peek().kind == Tok::kNot) {
      const Token& t = Advance();
      DepthGuard guard(this);
      auto e = NewExpr(Expr::Kind::kNot, t);
      e->args.push_back(ParseNot());
      return e;
    }
    return ParseComparison();
  }

  ExprPtr ParseComparison() {
    auto lhs = ParseArith();
    CmpOp op;
    switch (Peek().kind) {
      case Tok::kLt: op = CmpOp::kLt; break;
      case Tok::kLe: op = CmpOp::kLe; break;
      case Tok::kGt: op = CmpOp::kGt; break;
      case Tok::kGe: op = CmpOp::kGe; break;
      case Tok::kEq: op = CmpOp::kEq; break;
      case Tok::kNe: op = CmpOp::kNe; break;
      default: return lhs;
    }
    const Token& t = Advance();
    auto e = NewExpr(Expr::Kind::kCompare, t);
    e->cmp_op = op;
    e->args.push_back(std::move(lhs));
    e->args.push_back(ParseArith());
    return e;
  }

  ExprPtr ParseArith() {
    auto lhs = ParseTerm();
    while (Peek().kind == Tok::kPlus || Peek().kind == Tok::kMinus) {
      const Token& t = Advance();
      auto e = NewExpr(Expr::Kind::kBinary, t);
      e->bin_op = t.kind == Tok::kPlus ? BinOp::kAdd : BinOp::kSub;
      e->args.push_back(std::move(lhs));
      e->args.push_back(ParseTerm());
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr ParseTerm() {
    auto lhs = ParseUnary();
    while (Peek().kind == Tok::kStar || Peek().kind == Tok::kSlash) {
      const Token& t = Advance();
      auto e = NewExpr(Expr::Kind::kBinary, t);
      e->bin_op = t.kind == Tok::kStar ? BinOp::kMul : BinOp::kDiv;
      e->args.push_back(std::move(lhs));
      e->args.push_back(ParseUnary());
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr ParseUnary() {
    if (Peek().kind == Tok::kMinus) {
      const Token& t = Advance();
      DepthGuard guard(this);
      auto e = NewExpr(Expr::Kind::kNeg, t);
      e->args.push_back(ParseUnary());
      return e;
    }
    if (Peek().kind == Tok::kPlus) {  // unary plus is a no-op
      Advance();
      return ParseUnary();
    }
    return ParsePostfix();
  }

  ExprPtr ParsePostfix() {
    auto e = ParseAtom();
    if (Peek().kind == Tok::kLBracket) {
      if (e->kind != Expr::Kind::kLocal && e->kind != Expr::Kind::kObs) {
        throw ParseError("only variables can be indexed", Peek().line, Peek().col);
      }
      const Token& t = Advance();
      const Token& idx = Peek();
      if (idx.kind != Tok::kNumber) {
        throw ParseError("index must be an integer literal", idx.line, idx.col);
      }
      int index = IntIndex(idx);
      Advance();
      Expect(Tok::kRBracket, "']'");
      auto r = NewExpr(Expr::Kind::kElem, t);
      r->name = e->name;
      r->index = index;
      return r;
    }
    return e;
  }

  ExprPtr ParseAtom() {
    DepthGuard guard(this);
    const Token& t = Peek();
    switch (t.kind) {
      case Tok::kNumber: {
        Advance();
        auto e = NewExpr(Expr::Kind::kNumber, t);
        e->number = t.number;
        return e;
      }
      case Tok::kLParen: {
        Advance();
        auto e = ParseExpr();
        Expect(Tok::kRParen, "')'");
        return e;
      }
      case Tok::kLBracket: {
        Advance();
        auto e = NewExpr(Expr::Kind::kVector, t);
        if (Peek().kind == Tok::kRBracket) {
          throw ParseError("vector literal must not be empty", Peek().line, Peek().col);
        }
        e->args.push_back(ParseExpr());
        while (Peek().kind == Tok::kComma) {
          Advance();
          if (Peek().kind == Tok::kRBracket) break;  // trailing comma
          e->args.push_back(ParseExpr());
        }
        Expect(Tok::kRBracket, "']'");
        if (e->args.size() > kMaxVectorLen) {
          throw ParseError("vector literal exceeds the size limit", t.line, t.col);
        }
        return e;
      }
      case Tok::kName:
        return ParseNameOrCall();
      default:
        throw ParseError("expected an expression", t.line, t.col);
    }
  }

  ExprPtr ParseNameOrCall() {
    const Token& first = Advance();
    std::string dotted = first.text;
    while (Peek().kind == Tok::kDot) {
      Advance();
      dotted += '.';
      dotted += Expect(Tok::kName, "name after '.'").text;
    }
    if (Peek().kind == Tok::kLParen) {
      return ParseCall(dotted, first);
    }
    if (dotted.find('.') != std::string::npos) {
      throw ParseError("unknown identifier '" + dotted + "'", first.line, first.col);
    }
    if (dotted == "while" || dotted == "for" || dotted == "import" || dotted == "lambda" ||
        dotted == "True" || dotted == "False" || dotted == "None") {
      throw ParseError("disallowed construct '" + dotted + "'", first.line, first.col);
    }
    auto e = NewExpr(Expr::Kind::kLocal, first);
    e->name = dotted;
    return e;
  }

  ExprPtr ParseCall(const std::string& dotted, const Token& at) {
    std::string base = dotted;
    if (base.rfind("np.", 0) == 0) base = base.substr(3);
    else if (base.rfind("numpy.", 0) == 0) base = base.substr(6);
    else if (base.rfind("math.", 0) == 0) base = base.substr(5);
    if (base.find('.') != std::string::npos) {
      throw ParseError("unknown intrinsic '" + dotted + "'", at.line, at.col);
    }

    Expect(Tok::kLParen, "'('");
    if (base == "zeros") return ParseZeros(at);

    auto it = IntrinsicTable().find(base);
    if (it == IntrinsicTable().end()) {
      throw ParseError("unknown intrinsic '" + dotted + "'", at.line, at.col);
    }
    auto e = NewExpr(Expr::Kind::kCall, at);
    e->intrinsic = it->second.id;
    if (Peek().kind != Tok::kRParen) {
      e->args.push_back(ParseExpr());
      while (Peek().kind == Tok::kComma) {
        Advance();
        e->args.push_back(ParseExpr());
      }
    }
    Expect(Tok::kRParen, "')'");
    if (static_cast<int>(e->args.size()) != it->second.arity) {
      throw ParseError(std::string(IntrinsicName(it->second.id)) + " expects " +
                           std::to_string(it->second.arity) + " argument(s)",
                       at.line, at.col);
    }
    return e;
  }

  // np.zeros((n,)) or np.zeros(n): desugars to a vector literal of n zeros.
  ExprPtr ParseZeros(const Token& at) {
    bool tuple = false;
    if (Peek().kind == Tok::kLParen) {
      tuple = true;
      Advance();
    }
    const Token& n = Peek();
    if (n.kind != Tok::kNumber) {
      throw ParseError("np.zeros expects an integer size", n.line, n.col);
    }
    int len = IntIndex(n);
    Advance();
    if (tuple) {
      if (Peek().kind == Tok::kComma) Advance();
      Expect(Tok::kRParen, "')' closing the shape tuple");
    }
    Expect(Tok::kRParen, "')'");
    if (len < 1 || len > kMaxVectorLen) {
      throw ParseError("np.zeros size out of range", at.line, at.col);
    }
    auto e = NewExpr(Expr::Kind::kVector, at);
    for (int i = 0; i < len; ++i) {
      auto z = std::make_unique<Expr>();
      z->kind = Expr::Kind::kNumber;
      z->number = 0.0;
      z->line = at.line;
      z->col = at.col;
      e->args.push_back(std::move(z));
    }
    return e;
  }

  ExprPtr NewExpr(Expr::Kind kind, const Token& t) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = t.line;
    e->col = t.col;
    return e;
  }

  // -- static validation ----------------------------------------------------

  void Validate(const PolicyProgram& p) {
    assigned_.clear();
    CollectAssigned(p.body);
    if (assigned_.count(param_)) {
      throw ParseError("observation parameter '" + param_ + "' is read-only", 1, 1);
    }
    bool any_return = false;
    CheckStmts(p.body, &any_return);
    if (!any_return) {
      throw ParseError("policy must contain at least one return statement", 1, 1);
    }
  }

  void CollectAssigned(const std::vector<StmtPtr>& body) {
    for (const auto& s : body) {
      switch (s->kind) {
        case Stmt::Kind::kAssign:
        case Stmt::Kind::kElemAssign:
          assigned_.insert(s->target);
          break;
        case Stmt::Kind::kIf:
          for (const auto& b : s->branches) CollectAssigned(b.body);
          CollectAssigned(s->else_body);
          break;
        case Stmt::Kind::kReturn:
          break;
      }
    }
  }

  void CheckStmts(const std::vector<StmtPtr>& body, bool* any_return) {
    for (const auto& s : body) {
      switch (s->kind) {
        case Stmt::Kind::kAssign:
          CheckExpr(*s->value);
          break;
        case Stmt::Kind::kElemAssign:
          if (s->target == param_) {
            throw ParseError("observation parameter '" + param_ + "' is read-only", s->line,
                             s->col);
          }
          CheckExpr(*s->value);
          break;
        case Stmt::Kind::kIf:
          for (const auto& b : s->branches) {
            CheckExpr(*b.cond);
            CheckStmts(b.body, any_return);
          }
          CheckStmts(s->else_body, any_return);
          break;
        case Stmt::Kind::kReturn:
          CheckExpr(*s->value);
          *any_return = true;
          break;
      }
    }
  }

  void CheckExpr(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::kLocal:
        if (e.name == param_) {
          throw ParseError("observation parameter '" + e.name + "' must be indexed", e.line,
                           e.col);
        }
        if (!assigned_.count(e.name)) {
          throw ParseError("unknown identifier '" + e.name + "'", e.line, e.col);
        }
        break;
      case Expr::Kind::kElem:
        if (e.name == param_) {
          e.kind = Expr::Kind::kObs;
          if (e.index >= obs_dim_) {
            throw ParseError("obs index " + std::to_string(e.index) + " out of range [0, " +
                                 std::to_string(obs_dim_) + ")",
                             e.line, e.col);
          }
        } else if (!assigned_.count(e.name)) {
          throw ParseError("unknown identifier '" + e.name + "'", e.line, e.col);
        }
        break;
      default:
        break;
    }
    for (auto& a : e.args) CheckExpr(*a);
  }

  void AssignSlots(PolicyProgram* p) {
    slots_.clear();
    SlotStmts(p->body);
    p->num_slots = static_cast<int>(slots_.size());
  }

  int SlotFor(const std::string& name) {
    auto it = slots_.find(name);
    if (it != slots_.end()) return it->second;
    int id = static_cast<int>(slots_.size());
    slots_.emplace(name, id);
    return id;
  }

  void SlotStmts(std::vector<StmtPtr>& body) {
    for (auto& s : body) {
      switch (s->kind) {
        case Stmt::Kind::kAssign:
        case Stmt::Kind::kElemAssign:
          s->slot = SlotFor(s->target);
          SlotExpr(*s->value);
          break;
        case Stmt::Kind::kIf:
          for (auto& b : s->branches) {
            SlotExpr(*b.cond);
            SlotStmts(b.body);
          }
          SlotStmts(s->else_body);
          break;
        case Stmt::Kind::kReturn:
          SlotExpr(*s->value);
          break;
      }
    }
  }

  void SlotExpr(Expr& e) {
    if (e.kind == Expr::Kind::kLocal || e.kind == Expr::Kind::kElem) {
      e.slot = SlotFor(e.name);
    }
    for (auto& a : e.args) SlotExpr(*a);
  }

  struct DepthGuard {
    explicit DepthGuard(Parser* p) : parser(p) {
      if (++parser->depth_ > kMaxNestingDepth) {
        throw ParseError("expression too deeply nested", parser->Peek().line,
                         parser->Peek().col);
      }
    }
    ~DepthGuard() { --parser->depth_; }
    Parser* parser;
  };

  std::vector<Token> toks_;
  size_t pos_ = 0;
  int obs_dim_, action_dim_;
  int depth_ = 0;
  std::string param_ = "obs";
  std::set<std::string> assigned_;
  std::map<std::string, int> slots_;
};

}  // namespace

int IntrinsicArity(Intrinsic f) {
  switch (f) {
    case Intrinsic::kAtan2:
    case Intrinsic::kMin:
    case Intrinsic::kMax:
      return 2;
    case Intrinsic::kClip:
      return 3;
    default:
      return 1;
  }
}

const char* IntrinsicName(Intrinsic f) {
  switch (f) {
    case Intrinsic::kAbs: return "abs";
    case Intrinsic::kSign: return "np.sign";
    case Intrinsic::kSin: return "np.sin";
    case Intrinsic::kCos: return "np.cos";
    case Intrinsic::kTan: return "np.tan";
    case Intrinsic::kAtan2: return "np.arctan2";
    case Intrinsic::kSqrt: return "np.sqrt";
    case Intrinsic::kExp: return "np.exp";
    case Intrinsic::kTanh: return "np.tanh";
    case Intrinsic::kMin: return "min";
    case Intrinsic::kMax: return "max";
    case Intrinsic::kClip: return "np.clip";
    case Intrinsic::kFloor: return "np.floor";
  }
  return "?";
}

PolicyProgram Parse(std::string_view source, int obs_dim, int action_dim) {
  if (source.empty()) throw ParseError("empty source", 1, 1);
  if (source.size() > kMaxSourceBytes) throw ParseError("source too large", 1, 1);
  if (obs_dim < 1 || action_dim < 1 || action_dim > kMaxVectorLen) {
    throw ParseError("invalid observation/action dimensions", 1, 1);
  }
  Lexer lexer(source);
  Parser parser(lexer.Run(), obs_dim, action_dim);
  return parser.Run(source);
}

}  // namespace evoctl::policy
