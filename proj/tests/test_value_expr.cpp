#include <catch2/catch_amalgamated.hpp>

#include "cfuse/budget.hpp"
#include "cfuse/expr.hpp"
#include "cfuse/value.hpp"

using namespace cfuse;

TEST_CASE("values intern and compare", "[value]") {
  SECTION("booleans are the preloaded symbols") {
    REQUIRE(Value::boolean(false).as_symbol() == false_symbol());
    REQUIRE(Value::boolean(true).as_symbol() == true_symbol());
    REQUIRE(Value::boolean(true).is_bool());
    REQUIRE(Value::boolean(true).as_bool());
    REQUIRE_FALSE(Value::symbol("Hot").is_bool());
  }

  SECTION("interning is stable") {
    SymbolId a = intern_symbol("Freezing");
    REQUIRE(intern_symbol("Freezing") == a);
    REQUIRE(symbol_name(a) == "Freezing");
  }

  SECTION("ordering is numeric for ints, by name for symbols") {
    REQUIRE(value_less(Value::integer(-3), Value::integer(2)));
    // interning order must not leak into the value order
    intern_symbol("zz");
    intern_symbol("aa");
    REQUIRE(value_less(Value::symbol("aa"), Value::symbol("zz")));
    REQUIRE_FALSE(value_less(Value::symbol("zz"), Value::symbol("aa")));
  }

  SECTION("to_string") {
    REQUIRE(Value::integer(-7).to_string() == "-7");
    REQUIRE(Value::boolean(true).to_string() == "true");
    REQUIRE(Value::symbol("Cool").to_string() == "Cool");
  }
}

TEST_CASE("ranges canonicalize", "[value]") {
  SECTION("sorted regardless of input order") {
    Range r({Value::integer(3), Value::integer(1), Value::integer(2)});
    REQUIRE(r.values() == std::vector<Value>{Value::integer(1), Value::integer(2),
                                             Value::integer(3)});
    REQUIRE(r.min() == Value::integer(1));
  }

  SECTION("rejects duplicates, mixed tags and emptiness") {
    REQUIRE_THROWS_AS(Range({Value::integer(1), Value::integer(1)}), std::invalid_argument);
    REQUIRE_THROWS_AS(Range({Value::integer(1), Value::symbol("Hot")}), std::invalid_argument);
    REQUIRE_THROWS_AS(Range(std::vector<Value>{}), std::invalid_argument);
  }

  SECTION("bool_range is false then true") {
    REQUIRE(bool_range().values() ==
            std::vector<Value>{Value::boolean(false), Value::boolean(true)});
  }

  SECTION("contains") {
    Range r({Value::symbol("Hot"), Value::symbol("Cool")});
    REQUIRE(r.contains(Value::symbol("Hot")));
    REQUIRE_FALSE(r.contains(Value::symbol("Tepid")));
    REQUIRE_FALSE(r.contains(Value::integer(0)));
  }
}

namespace {

Value eval_closed(const Expr& e) { return eval(e, std::span<const Value>{}); }

Expr num(int64_t v) { return Expr::literal(Value::integer(v)); }

}  // namespace

TEST_CASE("expression evaluation", "[expr]") {
  SECTION("arithmetic") {
    REQUIRE(eval_closed(Expr::binary(ExprOp::Add, num(2), num(3))) == Value::integer(5));
    REQUIRE(eval_closed(Expr::binary(ExprOp::Sub, num(2), num(3))) == Value::integer(-1));
    REQUIRE(eval_closed(Expr::binary(ExprOp::Mul, num(4), num(3))) == Value::integer(12));
    REQUIRE(eval_closed(Expr::unary(ExprOp::Neg, num(7))) == Value::integer(-7));
    REQUIRE(eval_closed(Expr::binary(ExprOp::Min, num(4), num(3))) == Value::integer(3));
    REQUIRE(eval_closed(Expr::binary(ExprOp::Max, num(4), num(3))) == Value::integer(4));
  }

  SECTION("comparisons need matching tags for equality") {
    REQUIRE(eval_closed(Expr::binary(ExprOp::Eq, num(2), num(2))) == Value::boolean(true));
    REQUIRE(eval_closed(Expr::binary(ExprOp::Ne, num(2), num(3))) == Value::boolean(true));
    REQUIRE_THROWS_AS(
        eval_closed(Expr::binary(ExprOp::Eq, num(2), Expr::literal(Value::symbol("Hot")))),
        EvalError);
  }

  SECTION("order comparisons are integer-only") {
    REQUIRE(eval_closed(Expr::binary(ExprOp::Le, num(2), num(2))) == Value::boolean(true));
    REQUIRE_THROWS_AS(eval_closed(Expr::binary(ExprOp::Lt, Expr::literal(Value::symbol("Lo")),
                                               Expr::literal(Value::symbol("Hi")))),
                      EvalError);
  }

  SECTION("boolean operators require booleans on both sides") {
    Expr t = Expr::literal(Value::boolean(true));
    Expr f = Expr::literal(Value::boolean(false));
    REQUIRE(eval_closed(Expr::binary(ExprOp::And, t, f)) == Value::boolean(false));
    REQUIRE(eval_closed(Expr::binary(ExprOp::Or, t, f)) == Value::boolean(true));
    REQUIRE(eval_closed(Expr::binary(ExprOp::Xor, t, t)) == Value::boolean(false));
    REQUIRE(eval_closed(Expr::unary(ExprOp::Not, f)) == Value::boolean(true));
    REQUIRE_THROWS_AS(eval_closed(Expr::binary(ExprOp::And, t, num(1))), EvalError);
  }

  SECTION("if-then-else takes one branch lazily") {
    // the untaken branch would throw; laziness means it never runs
    Expr bad = Expr::binary(ExprOp::Add, num(1), Expr::literal(Value::symbol("Hot")));
    Expr e = Expr::ite(Expr::literal(Value::boolean(true)), num(9), bad);
    REQUIRE(eval_closed(e) == Value::integer(9));
  }

  SECTION("overflow is an EvalError, not wraparound") {
    Expr big = num(INT64_MAX);
    REQUIRE_THROWS_AS(eval_closed(Expr::binary(ExprOp::Add, big, num(1))), EvalError);
    REQUIRE_THROWS_AS(eval_closed(Expr::binary(ExprOp::Mul, big, num(2))), EvalError);
  }

  SECTION("unresolved variables are a caller bug") {
    REQUIRE_THROWS_AS(eval_closed(Expr::variable("A")), std::logic_error);
  }
}

TEST_CASE("expression utilities", "[expr]") {
  Expr e = Expr::ite(Expr::binary(ExprOp::Eq, Expr::variable("B"), num(1)),
                     Expr::variable("A"),
                     Expr::binary(ExprOp::Add, Expr::variable("A"), Expr::variable("C")));

  SECTION("mentioned variables are sorted and deduplicated") {
    REQUIRE(mentioned_variables(e) == std::vector<std::string>{"A", "B", "C"});
  }

  SECTION("node_count") {
    REQUIRE(node_count(num(1)) == 1);
    REQUIRE(node_count(Expr::binary(ExprOp::Add, num(1), num(2))) == 3);
  }

  SECTION("resolve_slots rejects unknown names") {
    Expr copy = e;
    REQUIRE_THROWS_AS(resolve_slots(copy, [](const std::string&) { return -1; }),
                      std::invalid_argument);
    Expr ok = e;
    resolve_slots(ok, [](const std::string& n) { return int(n[0] - 'A'); });
    std::vector<Value> slots = {Value::integer(10), Value::integer(1), Value::integer(5)};
    REQUIRE(eval(ok, slots) == Value::integer(10));
  }

  SECTION("text form keeps precedence without redundant parens") {
    REQUIRE(to_text(Expr::binary(ExprOp::Add, num(1),
                                 Expr::binary(ExprOp::Mul, num(2), num(3)))) == "1 + 2 * 3");
    REQUIRE(to_text(Expr::binary(ExprOp::Mul, Expr::binary(ExprOp::Add, num(1), num(2)),
                                 num(3))) == "(1 + 2) * 3");
    // subtraction associates left, so the right operand keeps its parens
    REQUIRE(to_text(Expr::binary(ExprOp::Sub, num(1),
                                 Expr::binary(ExprOp::Sub, num(2), num(3)))) == "1 - (2 - 3)");
    // negation binds looser than comparison here, so no parens are needed
    REQUIRE(to_text(Expr::unary(ExprOp::Not,
                                Expr::binary(ExprOp::Eq, Expr::variable("A"), num(1)))) ==
            "!A = 1");
    REQUIRE(to_text(Expr::binary(ExprOp::And,
                                 Expr::unary(ExprOp::Not, Expr::variable("A")),
                                 Expr::variable("B"))) == "!A & B");
  }
}

TEST_CASE("budgets stop runaway enumeration", "[budget]") {
  Budget b(10);
  b.charge(10);
  REQUIRE(b.used() == 10);
  REQUIRE_THROWS_AS(b.charge(), BudgetExceeded);

  SECTION("the process default is adjustable") {
    uint64_t before = default_enum_limit();
    set_default_enum_limit(123);
    REQUIRE(default_enum_limit() == 123);
    set_default_enum_limit(before);
  }
}
