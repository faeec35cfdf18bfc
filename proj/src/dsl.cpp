#include "cfuse/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace cfuse {

// ============================================================
// Lexer
// ============================================================

namespace {

enum class TokKind { Ident, Int, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  int64_t num = 0;
  int line = 1, col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_tail(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      size_t j = i + 1;
      while (j < text.size() && ident_tail(text[j])) ++j;
      t.kind = TokKind::Ident;
      t.text = text.substr(i, j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = TokKind::Int;
      t.text = text.substr(i, j - i);
      try {
        t.num = std::stoll(t.text);
      } catch (...) {
        throw ParseError("integer literal out of range", line, col);
      }
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    // Longest match first, so `<-` is one arrow, not a less-than.
    std::string two = text.substr(i, 2);
    if (two == "<-" || two == "<=" || two == ">=" || two == "!=") {
      t.kind = TokKind::Punct;
      t.text = two;
      advance(2);
      out.push_back(std::move(t));
      continue;
    }
    static const std::string singles = "{}():;=,+-*|&^!.<>[]";
    if (singles.find(c) != std::string::npos) {
      t.kind = TokKind::Punct;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(std::move(t));
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  Token end;
  end.kind = TokKind::End;
  end.line = line;
  end.col = col;
  out.push_back(std::move(end));
  return out;
}

std::string describe(const Token& t) {
  if (t.kind == TokKind::End) return "end of input";
  return "'" + t.text + "'";
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek() const { return toks_[pos_]; }
  Token next() {
    Token t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  bool at_punct(const std::string& p) const {
    return peek().kind == TokKind::Punct && peek().text == p;
  }
  bool at_word(const std::string& w) const {
    return peek().kind == TokKind::Ident && peek().text == w;
  }
  bool eat_punct(const std::string& p) {
    if (!at_punct(p)) return false;
    next();
    return true;
  }
  bool eat_word(const std::string& w) {
    if (!at_word(w)) return false;
    next();
    return true;
  }
  Token expect_punct(const std::string& p) {
    if (!at_punct(p)) fail("expected '" + p + "'");
    return next();
  }
  void expect_word(const std::string& w) {
    if (!at_word(w)) fail("expected '" + w + "'");
    next();
  }
  Token expect_int() {
    if (peek().kind != TokKind::Int) fail("expected an integer");
    return next();
  }
  // An identifier usable as a name, so keywords are rejected here.
  Token expect_name() {
    if (peek().kind != TokKind::Ident) fail("expected an identifier");
    if (!valid_identifier(peek().text))
      fail("'" + peek().text + "' is a reserved word");
    return next();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + ", found " + describe(peek()), peek().line, peek().col);
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// ============================================================
// Expressions
// ============================================================

Expr parse_expr(Cursor& c);

Expr parse_primary(Cursor& c) {
  if (c.eat_punct("(")) {
    Expr e = parse_expr(c);
    c.expect_punct(")");
    return e;
  }
  if (c.eat_word("if")) {
    Expr cond = parse_expr(c);
    c.expect_word("then");
    Expr then_e = parse_expr(c);
    c.expect_word("else");
    Expr else_e = parse_expr(c);
    return Expr::ite(std::move(cond), std::move(then_e), std::move(else_e));
  }
  if (c.at_word("min") || c.at_word("max")) {
    ExprOp op = c.at_word("min") ? ExprOp::Min : ExprOp::Max;
    c.next();
    c.expect_punct("(");
    Expr a = parse_expr(c);
    c.expect_punct(",");
    Expr b = parse_expr(c);
    c.expect_punct(")");
    return Expr::binary(op, std::move(a), std::move(b));
  }
  if (c.eat_word("true")) return Expr::literal(Value::boolean(true));
  if (c.eat_word("false")) return Expr::literal(Value::boolean(false));
  if (c.peek().kind == TokKind::Ident) {
    Token t = c.expect_name();  // keywords out of place get rejected here
    return Expr::variable(t.text);
  }
  if (c.peek().kind == TokKind::Int) {
    Token t = c.next();
    return Expr::literal(Value::integer(t.num));
  }
  c.fail("expected an expression");
}

Expr parse_unary(Cursor& c) {
  if (c.eat_punct("-")) return Expr::unary(ExprOp::Neg, parse_unary(c));
  return parse_primary(c);
}

Expr parse_term(Cursor& c) {
  Expr e = parse_unary(c);
  while (c.eat_punct("*")) e = Expr::binary(ExprOp::Mul, std::move(e), parse_unary(c));
  return e;
}

Expr parse_sum(Cursor& c) {
  Expr e = parse_term(c);
  while (c.at_punct("+") || c.at_punct("-")) {
    ExprOp op = c.next().text == "+" ? ExprOp::Add : ExprOp::Sub;
    e = Expr::binary(op, std::move(e), parse_term(c));
  }
  return e;
}

const std::map<std::string, ExprOp>& comparison_ops() {
  static const std::map<std::string, ExprOp> ops = {
      {"=", ExprOp::Eq},  {"!=", ExprOp::Ne}, {"<", ExprOp::Lt},
      {"<=", ExprOp::Le}, {">", ExprOp::Gt},  {">=", ExprOp::Ge}};
  return ops;
}

Expr parse_cmp(Cursor& c) {
  Expr e = parse_sum(c);
  auto it = c.peek().kind == TokKind::Punct ? comparison_ops().find(c.peek().text)
                                            : comparison_ops().end();
  if (it == comparison_ops().end()) return e;
  ExprOp op = it->second;
  c.next();
  e = Expr::binary(op, std::move(e), parse_sum(c));
  if (c.peek().kind == TokKind::Punct && comparison_ops().count(c.peek().text))
    c.fail("comparisons do not chain");
  return e;
}

Expr parse_not(Cursor& c) {
  if (c.eat_punct("!")) return Expr::unary(ExprOp::Not, parse_not(c));
  return parse_cmp(c);
}

Expr parse_and(Cursor& c) {
  Expr e = parse_not(c);
  while (c.at_punct("&") || c.at_punct("^")) {
    ExprOp op = c.next().text == "&" ? ExprOp::And : ExprOp::Xor;
    e = Expr::binary(op, std::move(e), parse_not(c));
  }
  return e;
}

Expr parse_expr(Cursor& c) {
  Expr e = parse_and(c);
  while (c.eat_punct("|")) e = Expr::binary(ExprOp::Or, std::move(e), parse_and(c));
  return e;
}

// Integers, negative integers, booleans, or bare symbols.
Value parse_value(Cursor& c) {
  if (c.eat_punct("-")) {
    Token t = c.expect_int();
    return Value::integer(-t.num);
  }
  if (c.peek().kind == TokKind::Int) return Value::integer(c.next().num);
  if (c.eat_word("true")) return Value::boolean(true);
  if (c.eat_word("false")) return Value::boolean(false);
  if (c.peek().kind == TokKind::Ident) {
    Token t = c.expect_name();
    return Value::symbol(intern_symbol(t.text));
  }
  c.fail("expected a value");
}

// Undeclared identifiers in equations are symbol literals.
void resolve_idents(Expr& e, const std::set<std::string>& declared) {
  if (e.op == ExprOp::Var) {
    if (!declared.count(e.var)) e = Expr::literal(Value::symbol(intern_symbol(e.var)));
    return;
  }
  for (Expr& k : e.kids) resolve_idents(k, declared);
}

}  // namespace

// ============================================================
// Model parsing
// ============================================================

ParseResult parse_model(const std::string& text) {
  ParseResult result;

  struct RawVar {
    bool exogenous = false;
    std::vector<Value> range;
    std::vector<Token> range_symbols;
    std::optional<Expr> equation;
    int line = 0, col = 0;
  };
  std::map<std::string, RawVar> raw;
  std::map<std::string, std::vector<std::string>> focuses;
  std::string model_name;

  try {
    Cursor c(lex(text));
    c.expect_word("model");
    model_name = c.expect_name().text;
    c.expect_punct("{");
    while (!c.eat_punct("}")) {
      if (c.at_word("exogenous") || c.at_word("endogenous")) {
        bool exo = c.next().text == "exogenous";
        Token vname = c.expect_name();
        c.expect_punct(":");
        RawVar rv;
        rv.exogenous = exo;
        rv.line = vname.line;
        rv.col = vname.col;
        c.expect_punct("{");
        do {
          if (c.peek().kind == TokKind::Ident && valid_identifier(c.peek().text))
            rv.range_symbols.push_back(c.peek());
          rv.range.push_back(parse_value(c));
        } while (c.eat_punct(","));
        c.expect_punct("}");
        if (!exo) {
          c.expect_punct("=");
          rv.equation = parse_expr(c);
        }
        c.expect_punct(";");
        if (raw.count(vname.text)) {
          result.diagnostics.push_back({"duplicate-declaration", vname.text,
                                        "variable declared twice", vname.line, vname.col});
        } else {
          raw.emplace(vname.text, std::move(rv));
        }
      } else if (c.eat_word("focus")) {
        Token vname = c.expect_name();
        c.expect_punct("<-");
        c.expect_punct("{");
        std::vector<std::string> members;
        if (!c.at_punct("}")) {
          do {
            members.push_back(c.expect_name().text);
          } while (c.eat_punct(","));
        }
        c.expect_punct("}");
        c.expect_punct(";");
        if (focuses.count(vname.text)) {
          result.diagnostics.push_back({"duplicate-declaration", vname.text,
                                        "focus declared twice", vname.line, vname.col});
        } else {
          focuses.emplace(vname.text, std::move(members));
        }
      } else {
        c.fail("expected a declaration");
      }
    }
    if (!c.at_end()) c.fail("expected end of input");
  } catch (const ParseError& e) {
    result.diagnostics.push_back({"syntax", "", e.what(), e.line, e.col});
    return result;
  }

  std::set<std::string> declared;
  for (const auto& [n, _] : raw) declared.insert(n);

  bool blocked = false;
  for (const Diagnostic& d : result.diagnostics)
    if (d.rule == "duplicate-declaration") blocked = true;
  for (const auto& [target, members] : focuses) {
    if (!declared.count(target)) {
      result.diagnostics.push_back(
          {"unknown-variable", target, "focus declared for an undeclared variable", 0, 0});
      blocked = true;
    }
    for (const std::string& g : members) {
      if (!declared.count(g)) {
        result.diagnostics.push_back(
            {"unknown-variable", g, "focus of '" + target + "' names an undeclared variable", 0,
             0});
        blocked = true;
      }
    }
  }
  for (const auto& [n, rv] : raw) {
    for (const Token& s : rv.range_symbols) {
      if (declared.count(s.text))
        result.diagnostics.push_back({"symbol-shadows-variable", s.text,
                                      "range of '" + n + "' uses a symbol spelled like a "
                                      "declared variable",
                                      s.line, s.col});
    }
  }
  if (blocked) return result;

  std::vector<VariableDecl> decls;
  for (auto& [n, rv] : raw) {
    VariableDecl d;
    d.name = n;
    d.exogenous = rv.exogenous;
    try {
      d.range = Range(rv.range);
    } catch (const std::invalid_argument& e) {
      result.diagnostics.push_back({"bad-range", n, e.what(), rv.line, rv.col});
      blocked = true;
      continue;
    }
    if (rv.equation) {
      resolve_idents(*rv.equation, declared);
      d.equation = std::move(rv.equation);
    }
    auto f = focuses.find(n);
    if (f != focuses.end()) d.focus = f->second;
    decls.push_back(std::move(d));
  }
  if (blocked) return result;

  try {
    CausalModel m(model_name, std::move(decls));
    for (const Diagnostic& d : m.validate()) {
      Diagnostic with_pos = d;
      auto it = raw.find(d.variable);
      if (it != raw.end()) {
        with_pos.line = it->second.line;
        with_pos.col = it->second.col;
      }
      result.diagnostics.push_back(std::move(with_pos));
    }
    result.model = std::move(m);
  } catch (const std::invalid_argument& e) {
    result.diagnostics.push_back({"construction", "", e.what(), 0, 0});
  }
  return result;
}

// ============================================================
// Serialization
// ============================================================

std::string serialize_model(const CausalModel& m) {
  std::ostringstream out;
  out << "model " << m.id() << " {\n";
  auto emit_range = [&](const Range& r) {
    out << "{";
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) out << ", ";
      out << r.values()[i].to_string();
    }
    out << "}";
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t i = 0; i < m.var_count(); ++i) {
      int s = int(i);
      if (m.is_exogenous(s) != (pass == 0)) continue;
      out << "  " << (pass == 0 ? "exogenous " : "endogenous ") << m.name(s) << " : ";
      emit_range(m.range(s));
      if (pass == 1) out << " = " << to_text(*m.equation(s));
      out << ";\n";
    }
  }
  for (size_t i = 0; i < m.var_count(); ++i) {
    out << "  focus " << m.name(int(i)) << " <- {";
    const auto& f = m.focus_slots(int(i));
    for (size_t k = 0; k < f.size(); ++k) {
      if (k) out << ", ";
      out << m.name(f[k]);
    }
    out << "};\n";
  }
  out << "}\n";
  return out.str();
}

// ============================================================
// Formulas
// ============================================================

namespace {

FormulaBody parse_body_or(Cursor& c, const CausalModel& model);

FormulaBody parse_body_prim(Cursor& c, const CausalModel& model) {
  if (c.eat_punct("(")) {
    FormulaBody b = parse_body_or(c, model);
    c.expect_punct(")");
    return b;
  }
  Token v = c.expect_name();
  if (!model.has_variable(v.text))
    throw ParseError("unknown variable '" + v.text + "'", v.line, v.col);
  c.expect_punct("=");
  return FormulaBody::prim(v.text, parse_value(c));
}

FormulaBody parse_body_not(Cursor& c, const CausalModel& model) {
  if (c.eat_punct("!")) return FormulaBody::neg(parse_body_not(c, model));
  return parse_body_prim(c, model);
}

FormulaBody parse_body_and(Cursor& c, const CausalModel& model) {
  FormulaBody b = parse_body_not(c, model);
  while (c.eat_punct("&")) b = FormulaBody::conj(std::move(b), parse_body_not(c, model));
  return b;
}

FormulaBody parse_body_or(Cursor& c, const CausalModel& model) {
  FormulaBody b = parse_body_and(c, model);
  while (c.eat_punct("|")) b = FormulaBody::disj(std::move(b), parse_body_and(c, model));
  return b;
}

}  // namespace

CausalFormula parse_formula(const std::string& text, const CausalModel& model) {
  Cursor c(lex(text));
  CausalFormula phi;
  c.expect_punct("[");
  if (!c.at_punct("]")) {
    do {
      Token v = c.expect_name();
      if (!model.has_variable(v.text))
        throw ParseError("unknown variable '" + v.text + "'", v.line, v.col);
      c.expect_punct("<-");
      phi.intervention.entries.emplace_back(v.text, parse_value(c));
    } while (c.eat_punct(","));
  }
  c.expect_punct("]");
  phi.body = parse_body_or(c, model);
  if (!c.at_end()) c.fail("expected end of formula");
  return phi;
}

// ============================================================
// CQBF
// ============================================================

namespace {

void require_boolean_ops(const Expr& e) {
  switch (e.op) {
    case ExprOp::Var:
      return;
    case ExprOp::Lit:
      if (e.lit.is_bool()) return;
      break;
    case ExprOp::And:
    case ExprOp::Or:
    case ExprOp::Xor:
    case ExprOp::Not:
      for (const Expr& k : e.kids) require_boolean_ops(k);
      return;
    default:
      break;
  }
  throw ParseError("matrix allows only boolean connectives over variables", 1, 1);
}

}  // namespace

CQBF parse_cqbf(const std::string& text) {
  Cursor c(lex(text));
  CQBF q;
  if (c.eat_word("forall")) {
    while (!c.at_punct(".")) q.universal.push_back(c.expect_name().text);
    c.expect_punct(".");
  }
  if (c.eat_word("exists")) {
    while (!c.at_punct(".")) q.existential.push_back(c.expect_name().text);
    c.expect_punct(".");
  }
  q.matrix = parse_expr(c);
  if (!c.at_end()) c.fail("expected end of formula");
  require_boolean_ops(q.matrix);
  return q;
}

// ============================================================
// Manifests
// ============================================================

PanelManifest parse_manifest(const std::string& text) {
  PanelManifest pm;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "model") {
      ManifestEntry e;
      std::string kw;
      if (!(ls >> e.path >> kw) || kw != "prior" || !(ls >> e.prior))
        throw ParseError("expected 'model <path> prior <decimal>'", lineno, 1);
      if (!(e.prior > 0.0) || e.prior > 1.0)
        throw ParseError("prior must lie in (0, 1]", lineno, 1);
      pm.models.push_back(std::move(e));
    } else if (key == "rule") {
      std::string r;
      if (!(ls >> r)) throw ParseError("expected a rule name", lineno, 1);
      if (r != "plain" && r != "threshold" && r != "inverse" && r != "exponential")
        throw ParseError("unknown rule '" + r + "'", lineno, 1);
      pm.rule = r;
    } else if (key == "cap") {
      long long v = -1;
      if (!(ls >> v) || v < 0) throw ParseError("cap needs a nonnegative integer", lineno, 1);
      pm.cap = uint64_t(v);
    } else {
      throw ParseError("unknown manifest key '" + key + "'", lineno, 1);
    }
    std::string extra;
    if (ls >> extra) throw ParseError("unexpected trailing text '" + extra + "'", lineno, 1);
  }
  if (pm.models.empty()) throw ParseError("manifest lists no models", lineno ? lineno : 1, 1);
  return pm;
}

}  // namespace cfuse
