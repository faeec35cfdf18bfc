#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "cfuse/model.hpp"
#include "helpers.hpp"

using namespace cfuse;

namespace {

VariableDecl exo(std::string name, Range r) {
  VariableDecl d;
  d.name = std::move(name);
  d.exogenous = true;
  d.range = std::move(r);
  return d;
}

VariableDecl endo(std::string name, Range r, Expr eq,
                  std::optional<std::vector<std::string>> focus = std::nullopt) {
  VariableDecl d;
  d.name = std::move(name);
  d.range = std::move(r);
  d.equation = std::move(eq);
  d.focus = std::move(focus);
  return d;
}

Range ints(std::initializer_list<int64_t> vs) {
  std::vector<Value> out;
  for (int64_t v : vs) out.push_back(Value::integer(v));
  return Range(std::move(out));
}

Context ctx(std::initializer_list<std::pair<const char*, Value>> entries) {
  Context u;
  for (const auto& [k, v] : entries) u.set(k, v);
  return u;
}

}  // namespace

TEST_CASE("construction canonicalizes and rejects malformed input", "[model]") {
  SECTION("variables end up sorted by name") {
    CausalModel m("M", {exo("B", ints({0, 1})), exo("A", ints({0, 1}))});
    REQUIRE(m.variable_names() == std::vector<std::string>{"A", "B"});
    REQUIRE(m.index_of("A") == 0);
    REQUIRE(m.index_of("missing") == -1);
  }

  SECTION("identifier rules") {
    REQUIRE(valid_identifier("A'"));
    REQUIRE(valid_identifier("_x9"));
    REQUIRE_FALSE(valid_identifier("9x"));
    REQUIRE_FALSE(valid_identifier("if"));
    REQUIRE_FALSE(valid_identifier(""));
    REQUIRE_THROWS_AS(CausalModel("M", {exo("if", ints({0, 1}))}), std::invalid_argument);
  }

  SECTION("duplicates, equation placement, self-mention") {
    REQUIRE_THROWS_AS(CausalModel("M", {exo("A", ints({0, 1})), exo("A", ints({0, 1}))}),
                      std::invalid_argument);
    VariableDecl bad = exo("A", ints({0, 1}));
    bad.equation = Expr::literal(Value::integer(0));
    REQUIRE_THROWS_AS(CausalModel("M", {bad}), std::invalid_argument);
    VariableDecl noeq;
    noeq.name = "B";
    noeq.range = ints({0, 1});
    REQUIRE_THROWS_AS(CausalModel("M", {noeq}), std::invalid_argument);
    REQUIRE_THROWS_AS(
        CausalModel("M", {endo("B", ints({0, 1}), Expr::variable("B"))}),
        std::invalid_argument);
  }

  SECTION("equations naming absent variables are rejected") {
    REQUIRE_THROWS_AS(
        CausalModel("M", {endo("B", ints({0, 1}), Expr::variable("Z"))}),
        std::invalid_argument);
  }
}

TEST_CASE("validation reports rule violations without throwing", "[model]") {
  SECTION("a valid model yields no diagnostics") {
    CausalModel m("M", {exo("A", ints({0, 1})),
                        endo("B", ints({0, 1}), Expr::variable("A"))});
    REQUIRE(m.validate().empty());
  }

  SECTION("range below two values") {
    CausalModel m("M", {exo("A", ints({3}))});
    auto diags = m.validate();
    REQUIRE(diags.size() == 1);
    REQUIRE(diags[0].rule == "range-too-small");
    REQUIRE(diags[0].variable == "A");
  }

  SECTION("closure failure names the offending variable") {
    // A + A can reach 2, outside B's range
    CausalModel m("M", {exo("A", ints({0, 1})),
                        endo("B", ints({0, 1}),
                             Expr::binary(ExprOp::Add, Expr::variable("A"),
                                          Expr::variable("A")))});
    auto diags = m.validate();
    REQUIRE_FALSE(diags.empty());
    REQUIRE(diags[0].rule == "closure-failure");
    REQUIRE(diags[0].variable == "B");
  }

  SECTION("focus must contain the parents") {
    CausalModel m("M", {exo("A", ints({0, 1})),
                        endo("B", ints({0, 1}), Expr::variable("A"),
                             std::vector<std::string>{})});
    auto diags = m.validate();
    REQUIRE(std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
      return d.rule == "parent-not-in-focus" && d.variable == "B";
    }));
  }

  SECTION("cyclic equations") {
    CausalModel m("M", {endo("A", ints({0, 1}), Expr::variable("B")),
                        endo("B", ints({0, 1}), Expr::variable("A"))});
    auto diags = m.validate();
    REQUIRE(std::any_of(diags.begin(), diags.end(),
                        [](const Diagnostic& d) { return d.rule == "cyclic-parent-graph"; }));
  }
}

TEST_CASE("parents are semantic, not syntactic", "[model]") {
  // B mentions A but ignores it: min(A, 0) is constantly 0 on {0, 1}
  CausalModel m("M", {exo("A", ints({0, 1})),
                      endo("B", ints({0, 1}),
                           Expr::binary(ExprOp::Min, Expr::variable("A"),
                                        Expr::literal(Value::integer(0))),
                           std::vector<std::string>{}),
                      endo("C", ints({0, 1}), Expr::variable("A"))});
  REQUIRE(m.parents("B").empty());
  REQUIRE(m.parents("C") == std::vector<std::string>{"A"});
  REQUIRE(m.parents("A").empty());
  // B has no parents, so its empty focus is legal
  REQUIRE(m.validate().empty());
}

TEST_CASE("default focus is the parent set, explicit focus may widen it", "[model]") {
  CausalModel m("M", {exo("A", ints({0, 1})), exo("Z", ints({0, 1})),
                      endo("B", ints({0, 1}), Expr::variable("A"),
                           std::vector<std::string>{"A", "Z"})});
  REQUIRE(m.focus("B") == std::vector<std::string>{"A", "Z"});
  REQUIRE(m.validate().empty());

  CausalModel dflt("M", {exo("A", ints({0, 1})),
                         endo("B", ints({0, 1}), Expr::variable("A"))});
  REQUIRE(dflt.focus("B") == std::vector<std::string>{"A"});
}

TEST_CASE("solving and intervening", "[model]") {
  CausalModel m("M", {exo("A", ints({0, 1, 2})),
                      endo("B", ints({0, 1, 2, 3, 4}),
                           Expr::binary(ExprOp::Add, Expr::variable("A"),
                                        Expr::variable("A"))),
                      endo("C", ints({0, 1, 2, 3, 4, 5}),
                           Expr::binary(ExprOp::Add, Expr::variable("B"),
                                        Expr::literal(Value::integer(1))))});

  SECTION("solve propagates in dependency order") {
    auto sol = m.solve(ctx({{"A", Value::integer(2)}}));
    REQUIRE(sol.at("B") == Value::integer(4));
    REQUIRE(sol.at("C") == Value::integer(5));
  }

  SECTION("solve validates the context") {
    REQUIRE_THROWS_AS(m.solve(Context{}), std::invalid_argument);
    REQUIRE_THROWS_AS(m.solve(ctx({{"A", Value::integer(9)}})), std::invalid_argument);
    REQUIRE_THROWS_AS(m.solve(ctx({{"A", Value::integer(1)}, {"B", Value::integer(0)}})),
                      std::invalid_argument);
  }

  SECTION("intervening replaces one equation") {
    CausalModel mi = m.intervene("B", Value::integer(0));
    auto sol = mi.solve(ctx({{"A", Value::integer(2)}}));
    REQUIRE(sol.at("B") == Value::integer(0));
    REQUIRE(sol.at("C") == Value::integer(1));
    // the original is untouched
    REQUIRE(m.solve(ctx({{"A", Value::integer(2)}})).at("B") == Value::integer(4));
  }

  SECTION("intervention target must be endogenous and in range") {
    REQUIRE_THROWS_AS(m.intervene("A", Value::integer(0)), std::invalid_argument);
    REQUIRE_THROWS_AS(m.intervene("B", Value::integer(9)), std::invalid_argument);
    REQUIRE_THROWS_AS(m.intervene("nope", Value::integer(0)), std::invalid_argument);
  }
}

TEST_CASE("satisfaction handles both intervention flavors", "[model]") {
  CausalModel m("M", {exo("A", ints({0, 1})),
                      endo("B", ints({0, 1}), Expr::variable("A"))});
  Context u = ctx({{"A", Value::integer(0)}});

  CausalFormula plain{Intervention{}, FormulaBody::prim("B", Value::integer(0))};
  REQUIRE(m.satisfies(u, plain));

  // endogenous intervention overrides the equation
  CausalFormula endo_iv{Intervention{{{"B", Value::integer(1)}}},
                        FormulaBody::prim("B", Value::integer(1))};
  REQUIRE(m.satisfies(u, endo_iv));

  // exogenous intervention overrides the context entry
  CausalFormula exo_iv{Intervention{{{"A", Value::integer(1)}}},
                       FormulaBody::prim("B", Value::integer(1))};
  REQUIRE(m.satisfies(u, exo_iv));

  SECTION("connectives") {
    CausalFormula f{Intervention{},
                    FormulaBody::disj(FormulaBody::prim("B", Value::integer(1)),
                                      FormulaBody::neg(FormulaBody::prim("B", Value::integer(1))))};
    REQUIRE(m.satisfies(u, f));
  }

  SECTION("formulas are over endogenous variables only") {
    CausalFormula f{Intervention{}, FormulaBody::prim("A", Value::integer(0))};
    REQUIRE_THROWS_AS(m.satisfies(u, f), std::invalid_argument);
  }

  SECTION("repeated intervention targets are rejected") {
    CausalFormula f{Intervention{{{"B", Value::integer(1)}, {"B", Value::integer(0)}}},
                    FormulaBody::prim("B", Value::integer(1))};
    REQUIRE_THROWS_AS(m.satisfies(u, f), std::invalid_argument);
  }
}

TEST_CASE("odometer enumerates lexicographically", "[model]") {
  Range r1 = ints({0, 1});
  Range r2 = ints({5, 6, 7});

  SECTION("full product in order") {
    Odometer od({&r1, &r2});
    std::vector<std::pair<int64_t, int64_t>> seen;
    while (od.next()) {
      seen.emplace_back(od.value(0).as_int(), od.value(1).as_int());
    }
    REQUIRE(seen.size() == 6);
    REQUIRE(seen.front() == std::pair<int64_t, int64_t>{0, 5});
    REQUIRE(seen[1] == std::pair<int64_t, int64_t>{0, 6});
    REQUIRE(seen.back() == std::pair<int64_t, int64_t>{1, 7});
  }

  SECTION("zero positions yield one empty combination") {
    Odometer od({});
    REQUIRE(od.next());
    REQUIRE_FALSE(od.next());
  }
}

TEST_CASE("semantic equality ignores syntax but not behavior", "[model]") {
  auto make = [&](Expr eq) {
    return CausalModel("M", {exo("A", ints({0, 1})),
                             endo("B", ints({0, 1, 2}), std::move(eq))});
  };
  // A + A and 2 * A agree pointwise on {0, 1}
  CausalModel m1 = make(Expr::binary(ExprOp::Add, Expr::variable("A"), Expr::variable("A")));
  CausalModel m2 = make(Expr::binary(ExprOp::Mul, Expr::literal(Value::integer(2)),
                                     Expr::variable("A")));
  CausalModel m3 = make(Expr::variable("A"));
  REQUIRE(semantically_equal(m1, m2));
  REQUIRE_FALSE(semantically_equal(m1, m3));

  SECTION("differing focus breaks equality even with equal tables") {
    CausalModel wide("M", {exo("A", ints({0, 1})), exo("Z", ints({0, 1})),
                           endo("B", ints({0, 1, 2}),
                                Expr::binary(ExprOp::Add, Expr::variable("A"),
                                             Expr::variable("A")),
                                std::vector<std::string>{"A", "Z"})});
    CausalModel narrow("M", {exo("A", ints({0, 1})), exo("Z", ints({0, 1})),
                             endo("B", ints({0, 1, 2}),
                                  Expr::binary(ExprOp::Add, Expr::variable("A"),
                                               Expr::variable("A")))});
    REQUIRE_FALSE(semantically_equal(wide, narrow));
  }

  SECTION("exogeneity matters") {
    CausalModel exo_b("M", {exo("A", ints({0, 1})), exo("B", ints({0, 1}))});
    CausalModel endo_b("M", {exo("A", ints({0, 1})),
                             endo("B", ints({0, 1}), Expr::variable("A"))});
    REQUIRE_FALSE(semantically_equal(exo_b, endo_b));
  }
}
