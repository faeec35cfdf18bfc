#include <catch2/catch_amalgamated.hpp>

#include "cfuse/combine.hpp"
#include "cfuse/explain.hpp"
#include "helpers.hpp"

using namespace cfuse;

namespace {

const CombinedModel& expect_model(const CombineOutcome& out) {
  if (const CombineError* e = std::get_if<CombineError>(&out)) {
    INFO("combination failed: " << e->to_string());
    REQUIRE(std::holds_alternative<CombinedModel>(out));
  }
  return std::get<CombinedModel>(out);
}

const CombineError& expect_error(const CombineOutcome& out) {
  REQUIRE(std::holds_alternative<CombineError>(out));
  return std::get<CombineError>(out);
}

}  // namespace

TEST_CASE("combining the temperature pair keeps each side's strength", "[combine]") {
  CausalModel m1 = load_fixture("ex1_m1.cmf");
  CausalModel m2 = load_fixture("ex1_m2.cmf");

  CombineOutcome out = combine(m1, m2);
  const CombinedModel& c = expect_model(out);
  REQUIRE(c.model.id() == "M1_oplus_M2");
  REQUIRE(c.model.validate().empty());

  SECTION("provenance picks the explaining side per variable") {
    REQUIRE(c.provenance.at("C") == "M1");
    REQUIRE(c.provenance.at("B") == "M2");
  }

  SECTION("the carried focus sets survive") {
    REQUIRE(c.model.focus("C") == std::vector<std::string>{"A", "B", "T"});
    REQUIRE(c.model.focus("B") == std::vector<std::string>{"B'", "T"});
  }

  SECTION("the carried equations are extensionally the donors'") {
    REQUIRE(c_equivalent(c.model, m1, "C"));
    REQUIRE(c_equivalent(c.model, m2, "B"));
  }

  SECTION("the result dominates both inputs") {
    REQUIRE(dominates(c.model, m1));
    REQUIRE(dominates(c.model, m2));
  }

  SECTION("both operand orders agree up to table equality") {
    CombineOutcome reversed = combine(m2, m1);
    REQUIRE(semantically_equal(c.model, expect_model(reversed).model));
  }
}

TEST_CASE("ties go to the first operand", "[combine]") {
  CausalModel a = model_from(
      "model A { exogenous X : {0, 1}; endogenous Y : {0, 1, 2} = X + X; }");
  CausalModel b = model_from(
      "model B { exogenous X : {0, 1}; endogenous Y : {0, 1, 2} = 2 * X; }");
  // both sides explain Y; provenance shows who donated it
  CombineOutcome out_ab = combine(a, b);
  CombineOutcome out_ba = combine(b, a);
  const CombinedModel& ab = expect_model(out_ab);
  const CombinedModel& ba = expect_model(out_ba);
  REQUIRE(ab.provenance.at("Y") == "A");
  REQUIRE(ba.provenance.at("Y") == "B");
  // tie donors are interchangeable, so the results are still equal
  REQUIRE(semantically_equal(ab.model, ba.model));
}

TEST_CASE("acyclic inputs can still collide into a cycle", "[combine]") {
  CausalModel m1 = load_fixture("cyclic_m1.cmf");
  CausalModel m2 = load_fixture("cyclic_m2.cmf");
  REQUIRE(m1.validate().empty());
  REQUIRE(m2.validate().empty());
  REQUIRE(compatible(m1, m2));
  REQUIRE_FALSE(union_acyclicity_precheck(m1, m2));

  CombineOutcome prime = combine_prime(m1, m2);
  const CombineError& e = expect_error(prime);
  REQUIRE(e.kind == CombineError::Kind::CyclicCombination);
  REQUIRE(e.to_string() == "cyclic-combination");
  // the full combine refuses the same way
  CombineOutcome full = combine(m1, m2);
  REQUIRE(expect_error(full).kind == CombineError::Kind::CyclicCombination);
}

TEST_CASE("the precheck accepts combinable pairs", "[combine]") {
  CausalModel m1 = load_fixture("ex1_m1.cmf");
  CausalModel m2 = load_fixture("ex1_m2.cmf");
  REQUIRE(union_acyclicity_precheck(m1, m2));
  REQUIRE(union_acyclicity_precheck(m1, m1));
}

TEST_CASE("incompatible pairs refuse to combine", "[combine]") {
  CausalModel andm = model_from(
      "model AND {\n"
      "  exogenous A : {false, true};\n"
      "  exogenous B : {false, true};\n"
      "  endogenous C : {false, true} = A & B;\n"
      "}");
  CausalModel orm = model_from(
      "model OR {\n"
      "  exogenous A : {false, true};\n"
      "  exogenous B : {false, true};\n"
      "  endogenous C : {false, true} = A | B;\n"
      "}");
  CombineOutcome out = combine_prime(andm, orm);
  const CombineError& e = expect_error(out);
  REQUIRE(e.kind == CombineError::Kind::Incompatible);
  REQUIRE(e.variable == "C");
  REQUIRE(e.to_string() == "incompatible(C)");
}

TEST_CASE("a raw union need not be a least upper bound", "[combine]") {
  CausalModel m1 = load_fixture("ex3_m1.cmf");
  CausalModel m2 = load_fixture("ex3_m2.cmf");
  REQUIRE(compatible(m1, m2));

  SECTION("the raw union exists and takes C from the side that explains it") {
    CombineOutcome out = combine_prime(m1, m2);
    const CombinedModel& c = expect_model(out);
    REQUIRE(c.provenance.at("C") == "M1");
    REQUIRE(c.provenance.at("A") == "M2");
    REQUIRE(c.provenance.at("B") == "M2");
    REQUIRE(c.provenance.at("D") == "M2");
    // pinning every former input freedom collapses C to a constant the
    // second model can still vary, so domination fails there
    REQUIRE_FALSE(can_explain(c.model, m2, "C"));
  }

  SECTION("the checked combination reports the unexplained input") {
    CombineOutcome out = combine(m1, m2);
    const CombineError& e = expect_error(out);
    REQUIRE(e.kind == CombineError::Kind::NotLeastUpperBound);
    REQUIRE(e.model_id == "M2");
    REQUIRE(e.variable == "C");
    REQUIRE(e.to_string() == "not-least-upper-bound(M2, C)");
  }
}

TEST_CASE("absorption: combining with a dominated model changes nothing", "[combine]") {
  CausalModel m1 = load_fixture("ex1_m1.cmf");
  CausalModel sub = model_from(
      "model SUB {\n"
      "  exogenous A' : {1, 2, 3};\n"
      "  endogenous A : {1, 2, 3, 4, 5} = A';\n"
      "}");
  REQUIRE(compatible(m1, sub));
  CombineOutcome out = combine_prime(m1, sub);
  const CombinedModel& c = expect_model(out);
  for (const auto& v : c.model.variable_names()) REQUIRE(c_equivalent(c.model, m1, v));
  REQUIRE(semantically_equal(c.model, m1));
}

TEST_CASE("folding a panel is order independent", "[combine]") {
  CausalModel m1 = load_fixture("w4_m1.cmf");
  CausalModel m2 = load_fixture("w4_m2.cmf");

  SECTION("a compatible pair folds") {
    CombineOutcome out = combine_all({m1, m2});
    const CombinedModel& c = expect_model(out);
    REQUIRE(c.model.id() == "M1_oplus_M2");
    REQUIRE(c.model.var_count() == 5);  // A, B, C, D, G
    REQUIRE(c.provenance.at("B") == "M2");
    REQUIRE(c.provenance.at("C") == "M1");
  }

  SECTION("an incompatible list is rejected up front") {
    CausalModel m3 = load_fixture("w4_m3.cmf");
    CombineOutcome out = combine_all({m1, m2, m3});
    REQUIRE(expect_error(out).kind == CombineError::Kind::Incompatible);
  }

  SECTION("singleton lists come back as themselves") {
    CombineOutcome out = combine_all({m1});
    REQUIRE(semantically_equal(expect_model(out).model, m1));
  }
}

TEST_CASE("mutual compatibility is inductive, not pairwise", "[combine]") {
  CausalModel m1 = load_fixture("w4_m1.cmf");
  CausalModel m2 = load_fixture("w4_m2.cmf");
  CausalModel m3 = load_fixture("w4_m3.cmf");

  REQUIRE(mutually_compatible({&m1, &m2}));
  REQUIRE(mutually_compatible({&m2, &m3}));
  REQUIRE_FALSE(mutually_compatible({&m1, &m3}));

  CombineError cause;
  REQUIRE_FALSE(mutually_compatible({&m1, &m2, &m3}, &cause));
  REQUIRE(cause.kind == CombineError::Kind::Incompatible);
  REQUIRE(cause.variable == "C");
}

TEST_CASE("combination surfaces budget exhaustion as an outcome", "[combine]") {
  CausalModel m1 = load_fixture("ex1_m1.cmf");
  CausalModel m2 = load_fixture("ex1_m2.cmf");
  uint64_t before = default_enum_limit();
  set_default_enum_limit(10);
  CombineOutcome out = combine(m1, m2);
  set_default_enum_limit(before);
  const CombineError& e = expect_error(out);
  REQUIRE(e.kind == CombineError::Kind::BudgetExceeded);
  REQUIRE(e.to_string() == "budget-exceeded");
}
