#include "cfuse/expr.hpp"

#include <algorithm>
#include <utility>

namespace cfuse {

Expr Expr::literal(Value v) {
  Expr e;
  e.op = ExprOp::Lit;
  e.lit = v;
  return e;
}

Expr Expr::variable(std::string name) {
  Expr e;
  e.op = ExprOp::Var;
  e.var = std::move(name);
  return e;
}

Expr Expr::unary(ExprOp op, Expr a) {
  Expr e;
  e.op = op;
  e.kids.push_back(std::move(a));
  return e;
}

Expr Expr::binary(ExprOp op, Expr a, Expr b) {
  Expr e;
  e.op = op;
  e.kids.push_back(std::move(a));
  e.kids.push_back(std::move(b));
  return e;
}

Expr Expr::ite(Expr cond, Expr then_e, Expr else_e) {
  Expr e;
  e.op = ExprOp::Ite;
  e.kids.push_back(std::move(cond));
  e.kids.push_back(std::move(then_e));
  e.kids.push_back(std::move(else_e));
  return e;
}

namespace {

const char* op_name(ExprOp op) {
  switch (op) {
    case ExprOp::Add: return "+";
    case ExprOp::Sub: return "-";
    case ExprOp::Mul: return "*";
    case ExprOp::Neg: return "-";
    case ExprOp::Min: return "min";
    case ExprOp::Max: return "max";
    case ExprOp::Eq: return "=";
    case ExprOp::Ne: return "!=";
    case ExprOp::Lt: return "<";
    case ExprOp::Le: return "<=";
    case ExprOp::Gt: return ">";
    case ExprOp::Ge: return ">=";
    case ExprOp::And: return "&";
    case ExprOp::Or: return "|";
    case ExprOp::Xor: return "^";
    case ExprOp::Not: return "!";
    default: return "?";
  }
}

int64_t require_int(const Value& v, ExprOp op) {
  if (!v.is_int()) {
    throw EvalError(std::string("operator '") + op_name(op) + "' needs integers, got symbol " +
                    v.to_string());
  }
  return v.as_int();
}

bool require_bool(const Value& v, ExprOp op) {
  if (!v.is_bool()) {
    throw EvalError(std::string("operator '") + op_name(op) + "' needs booleans, got " +
                    v.to_string());
  }
  return v.as_bool();
}

}  // namespace

Value eval(const Expr& e, std::span<const Value> slots) {
  switch (e.op) {
    case ExprOp::Lit:
      return e.lit;
    case ExprOp::Var:
      if (e.slot < 0 || static_cast<size_t>(e.slot) >= slots.size()) {
        throw std::logic_error("expression evaluated before slot resolution: " + e.var);
      }
      return slots[static_cast<size_t>(e.slot)];
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul: {
      int64_t a = require_int(eval(e.kids[0], slots), e.op);
      int64_t b = require_int(eval(e.kids[1], slots), e.op);
      int64_t out = 0;
      bool overflow = false;
      if (e.op == ExprOp::Add) {
        overflow = __builtin_add_overflow(a, b, &out);
      } else if (e.op == ExprOp::Sub) {
        overflow = __builtin_sub_overflow(a, b, &out);
      } else {
        overflow = __builtin_mul_overflow(a, b, &out);
      }
      if (overflow) {
        throw EvalError("integer overflow");
      }
      return Value::integer(out);
    }
    case ExprOp::Neg: {
      int64_t a = require_int(eval(e.kids[0], slots), e.op);
      int64_t out = 0;
      if (__builtin_sub_overflow(int64_t{0}, a, &out)) {
        throw EvalError("integer overflow");
      }
      return Value::integer(out);
    }
    case ExprOp::Min:
    case ExprOp::Max: {
      int64_t a = require_int(eval(e.kids[0], slots), e.op);
      int64_t b = require_int(eval(e.kids[1], slots), e.op);
      return Value::integer(e.op == ExprOp::Min ? std::min(a, b) : std::max(a, b));
    }
    case ExprOp::Eq:
    case ExprOp::Ne: {
      Value a = eval(e.kids[0], slots);
      Value b = eval(e.kids[1], slots);
      if (a.kind != b.kind) {
        throw EvalError("equality between integer and symbol: " + a.to_string() + " vs " +
                        b.to_string());
      }
      return Value::boolean((a == b) == (e.op == ExprOp::Eq));
    }
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge: {
      int64_t a = require_int(eval(e.kids[0], slots), e.op);
      int64_t b = require_int(eval(e.kids[1], slots), e.op);
      bool r = false;
      switch (e.op) {
        case ExprOp::Lt: r = a < b; break;
        case ExprOp::Le: r = a <= b; break;
        case ExprOp::Gt: r = a > b; break;
        default: r = a >= b; break;
      }
      return Value::boolean(r);
    }
    case ExprOp::And:
    case ExprOp::Or:
    case ExprOp::Xor: {
      // Eager on purpose: an equation is total only if both operands are
      // well-typed everywhere, and validation relies on that.
      bool a = require_bool(eval(e.kids[0], slots), e.op);
      bool b = require_bool(eval(e.kids[1], slots), e.op);
      bool r = e.op == ExprOp::And ? (a && b) : e.op == ExprOp::Or ? (a || b) : (a != b);
      return Value::boolean(r);
    }
    case ExprOp::Not:
      return Value::boolean(!require_bool(eval(e.kids[0], slots), e.op));
    case ExprOp::Ite: {
      bool c = require_bool(eval(e.kids[0], slots), e.op);
      return eval(e.kids[c ? 1 : 2], slots);
    }
  }
  throw std::logic_error("unhandled expression operator");
}

namespace {

void collect(const Expr& e, std::vector<std::string>& vars, std::vector<std::string>& syms) {
  if (e.op == ExprOp::Var) {
    vars.push_back(e.var);
  } else if (e.op == ExprOp::Lit && e.lit.is_symbol()) {
    syms.push_back(symbol_name(e.lit.as_symbol()));
  }
  for (const Expr& k : e.kids) {
    collect(k, vars, syms);
  }
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::vector<std::string> mentioned_variables(const Expr& e) {
  std::vector<std::string> vars, syms;
  collect(e, vars, syms);
  return sorted_unique(std::move(vars));
}

std::vector<std::string> mentioned_symbols(const Expr& e) {
  std::vector<std::string> vars, syms;
  collect(e, vars, syms);
  return sorted_unique(std::move(syms));
}

size_t node_count(const Expr& e) {
  size_t n = 1;
  for (const Expr& k : e.kids) {
    n += node_count(k);
  }
  return n;
}

namespace {

// Precedence, loosest binding first. if-then-else is grammatically a primary
// but prints at the loosest level so it is parenthesized under any operator.
int precedence(ExprOp op) {
  switch (op) {
    case ExprOp::Ite: return 0;
    case ExprOp::Or: return 1;
    case ExprOp::And:
    case ExprOp::Xor: return 2;
    case ExprOp::Not: return 3;
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge: return 4;
    case ExprOp::Add:
    case ExprOp::Sub: return 5;
    case ExprOp::Mul: return 6;
    case ExprOp::Neg: return 7;
    default: return 8;
  }
}

void print(const Expr& e, int context, std::string& out) {
  int level = precedence(e.op);
  bool need_parens = level < context;
  if (need_parens) {
    out += '(';
  }
  switch (e.op) {
    case ExprOp::Lit:
      out += e.lit.to_string();
      break;
    case ExprOp::Var:
      out += e.var;
      break;
    case ExprOp::Min:
    case ExprOp::Max:
      out += e.op == ExprOp::Min ? "min(" : "max(";
      print(e.kids[0], 0, out);
      out += ", ";
      print(e.kids[1], 0, out);
      out += ')';
      break;
    case ExprOp::Not:
      out += '!';
      print(e.kids[0], level, out);
      break;
    case ExprOp::Neg:
      out += '-';
      print(e.kids[0], level, out);
      break;
    case ExprOp::Ite:
      out += "if ";
      print(e.kids[0], 1, out);
      out += " then ";
      print(e.kids[1], 1, out);
      out += " else ";
      print(e.kids[2], 1, out);
      break;
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge:
      // Comparisons do not chain; both operands live one level up.
      print(e.kids[0], level + 1, out);
      out += ' ';
      out += op_name(e.op);
      out += ' ';
      print(e.kids[1], level + 1, out);
      break;
    default:
      // Left-associative binary operator.
      print(e.kids[0], level, out);
      out += ' ';
      out += op_name(e.op);
      out += ' ';
      print(e.kids[1], level + 1, out);
      break;
  }
  if (need_parens) {
    out += ')';
  }
}

}  // namespace

std::string to_text(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

}  // namespace cfuse
