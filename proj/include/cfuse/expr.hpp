#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfuse/value.hpp"

namespace cfuse {

// Typed evaluation failure (arithmetic on a symbol, boolean operator on a
// non-boolean, mismatched-tag equality, integer overflow). Model validation
// surfaces these as closure diagnostics by exhausting the equation's domain.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExprOp : uint8_t {
  Lit,
  Var,
  Add,
  Sub,
  Mul,
  Neg,
  Min,
  Max,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  Xor,
  Not,
  Ite,
};

// Value-semantic expression tree. Var nodes carry the written name plus a
// slot index resolved against one particular model's variable order; an
// expression moved between models (combination does this) is re-resolved.
struct Expr {
  ExprOp op = ExprOp::Lit;
  Value lit{};
  std::string var;
  int slot = -1;
  std::vector<Expr> kids;

  static Expr literal(Value v);
  static Expr variable(std::string name);
  static Expr unary(ExprOp op, Expr a);
  static Expr binary(ExprOp op, Expr a, Expr b);
  static Expr ite(Expr cond, Expr then_e, Expr else_e);

  friend bool operator==(const Expr&, const Expr&) = default;
};

// Evaluates a fully resolved expression over one total assignment (indexed
// by slot). if-then-else takes only the chosen branch; all other operators
// evaluate eagerly. Throws EvalError on type violations and overflow.
Value eval(const Expr& e, std::span<const Value> slots);

// Variable names mentioned anywhere in the tree (sorted, deduplicated).
std::vector<std::string> mentioned_variables(const Expr& e);

// Symbol literals appearing in the tree (sorted names, deduplicated).
std::vector<std::string> mentioned_symbols(const Expr& e);

// Rewrites Var slots via the lookup (name -> slot); throws std::invalid_argument
// on names the lookup rejects (returns a negative slot for).
template <typename Lookup>
void resolve_slots(Expr& e, const Lookup& lookup) {
  if (e.op == ExprOp::Var) {
    int s = lookup(e.var);
    if (s < 0) {
      throw std::invalid_argument("unknown variable in expression: " + e.var);
    }
    e.slot = s;
  }
  for (Expr& k : e.kids) {
    resolve_slots(k, lookup);
  }
}

size_t node_count(const Expr& e);

// Canonical text form, minimal parentheses; reparsing yields the same tree.
std::string to_text(const Expr& e);

}  // namespace cfuse
