#include "cfuse/qbf.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "cfuse/budget.hpp"

namespace cfuse {

namespace {

void check_cqbf(const CQBF& q) {
  std::set<std::string> seen;
  for (const std::string& v : q.universal)
    if (!valid_identifier(v) || !seen.insert(v).second)
      throw std::invalid_argument("bad or duplicate quantified variable '" + v + "'");
  for (const std::string& v : q.existential)
    if (!valid_identifier(v) || !seen.insert(v).second)
      throw std::invalid_argument("bad or duplicate quantified variable '" + v + "'");
  for (const std::string& v : mentioned_variables(q.matrix))
    if (!seen.count(v))
      throw std::invalid_argument("matrix mentions unquantified variable '" + v + "'");
}

}  // namespace

Reduction reduce_cqbf(const CQBF& q) {
  check_cqbf(q);

  // The construction needs every quantified variable to appear in the
  // matrix; vacuous conjuncts v | !v change nothing else.
  std::set<std::string> mentioned;
  for (const std::string& v : mentioned_variables(q.matrix)) mentioned.insert(v);
  std::vector<std::string> pad_order = q.universal;
  pad_order.insert(pad_order.end(), q.existential.begin(), q.existential.end());
  Expr matrix = q.matrix;
  for (const std::string& v : pad_order) {
    if (mentioned.count(v)) continue;
    Expr taut = Expr::binary(ExprOp::Or, Expr::variable(v),
                             Expr::unary(ExprOp::Not, Expr::variable(v)));
    matrix = Expr::binary(ExprOp::And, std::move(matrix), std::move(taut));
  }

  std::string target = "C";
  std::set<std::string> names(q.universal.begin(), q.universal.end());
  names.insert(q.existential.begin(), q.existential.end());
  while (names.count(target)) target += "'";

  Range booleans = bool_range();
  std::vector<VariableDecl> decls2;
  for (const std::string& x : q.universal)
    decls2.push_back({x, true, booleans, std::nullopt, std::nullopt});
  {
    VariableDecl c;
    c.name = target;
    c.exogenous = false;
    c.range = booleans;
    c.equation = Expr::literal(Value::boolean(true));
    c.focus = q.universal;
    decls2.push_back(std::move(c));
  }

  std::vector<VariableDecl> decls1;
  std::vector<std::string> all_vars = q.universal;
  all_vars.insert(all_vars.end(), q.existential.begin(), q.existential.end());
  for (const std::string& x : all_vars)
    decls1.push_back({x, true, booleans, std::nullopt, std::nullopt});
  {
    VariableDecl c;
    c.name = target;
    c.exogenous = false;
    c.range = booleans;
    c.equation = std::move(matrix);
    c.focus = all_vars;
    decls1.push_back(std::move(c));
  }

  return Reduction{CausalModel("m1", std::move(decls1)), CausalModel("m2", std::move(decls2)),
                   target};
}

bool qbf_brute_force(const CQBF& q, size_t max_vars) {
  check_cqbf(q);
  size_t nu = q.universal.size(), ne = q.existential.size();
  if (nu + ne > max_vars)
    throw std::invalid_argument("formula exceeds the brute-force variable cap");

  // One slot per variable, universals first.
  std::map<std::string, int> slot;
  for (size_t i = 0; i < nu; ++i) slot[q.universal[i]] = int(i);
  for (size_t i = 0; i < ne; ++i) slot[q.existential[i]] = int(nu + i);
  Expr matrix = q.matrix;
  resolve_slots(matrix, [&](const std::string& n) { return slot.at(n); });

  Budget budget;
  std::vector<Value> vals(nu + ne, Value::boolean(false));
  for (uint64_t xm = 0; xm < (uint64_t(1) << nu); ++xm) {
    for (size_t i = 0; i < nu; ++i) vals[i] = Value::boolean((xm >> i) & 1);
    bool witnessed = false;
    for (uint64_t ym = 0; ym < (uint64_t(1) << ne) && !witnessed; ++ym) {
      for (size_t i = 0; i < ne; ++i) vals[nu + i] = Value::boolean((ym >> i) & 1);
      budget.charge();
      witnessed = eval(matrix, vals).as_bool();
    }
    if (!witnessed) return false;
  }
  return true;
}

DecisionStats decide_can_explain(const CausalModel& m1, const CausalModel& m2,
                                 const std::string& var) {
  int s1 = m1.index_of(var);
  int s2 = m2.index_of(var);
  if (s1 < 0 || s2 < 0)
    throw std::invalid_argument("variable '" + var + "' missing from a model");
  Budget budget;
  DecisionStats stats;

  if (!(m1.range(s1) == m2.range(s2))) return stats;
  std::vector<std::string> g1, g2;
  for (int g : m1.focus_slots(s1)) g1.push_back(m1.name(g));
  for (int g : m2.focus_slots(s2)) g2.push_back(m2.name(g));
  if (!std::includes(g1.begin(), g1.end(), g2.begin(), g2.end())) return stats;

  std::vector<int> iv2, iv1;
  for (const std::string& g : g2) {
    int a2 = m2.index_of(g);
    int a1 = m1.index_of(g);
    iv2.push_back(a2);
    iv1.push_back(a1);
    for (const Value& v : m2.range(a2).values())
      if (!m1.range(a1).contains(v)) return stats;
  }

  std::vector<char> pin2(m2.var_count(), 0), pin1(m1.var_count(), 0);
  for (int s : m2.exogenous_slots()) pin2[size_t(s)] = 1;
  for (int s : iv2) pin2[size_t(s)] = 1;
  for (int s : m1.exogenous_slots()) pin1[size_t(s)] = 1;
  for (int s : iv1) pin1[size_t(s)] = 1;

  // Full context spaces on both sides: every exogenous combination, no
  // pruning. Intervened exogenous slots get overwritten after the context
  // is laid down, mirroring context surgery.
  std::vector<const Range*> iv_ranges, exo2_ranges, exo1_ranges;
  for (int s : iv2) iv_ranges.push_back(&m2.range(s));
  for (int s : m2.exogenous_slots()) exo2_ranges.push_back(&m2.range(s));
  for (int s : m1.exogenous_slots()) exo1_ranges.push_back(&m1.range(s));

  std::vector<Value> slots2, slots1;
  m2.init_slots(slots2);
  m1.init_slots(slots1);

  struct ValueLess {
    bool operator()(const Value& a, const Value& b) const { return value_less(a, b); }
  };

  Odometer iv_od(std::move(iv_ranges));
  while (iv_od.next()) {
    ++stats.interventions_examined;

    std::set<Value, ValueLess> realized;
    {
      Odometer od(exo2_ranges);
      while (od.next()) {
        ++stats.contexts_examined;
        for (size_t i = 0; i < exo2_ranges.size(); ++i)
          slots2[size_t(m2.exogenous_slots()[i])] = od.value(i);
        for (size_t i = 0; i < iv2.size(); ++i) slots2[size_t(iv2[i])] = iv_od.value(i);
        m2.solve_slots(slots2, pin2, budget);
        realized.insert(slots2[size_t(s2)]);
      }
    }

    std::set<Value, ValueLess> reproduced;
    Odometer od(exo1_ranges);
    while (reproduced.size() < realized.size() && od.next()) {
      ++stats.contexts_examined;
      for (size_t i = 0; i < exo1_ranges.size(); ++i)
        slots1[size_t(m1.exogenous_slots()[i])] = od.value(i);
      for (size_t i = 0; i < iv1.size(); ++i) slots1[size_t(iv1[i])] = iv_od.value(i);
      m1.solve_slots(slots1, pin1, budget);
      const Value& v = slots1[size_t(s1)];
      if (realized.count(v)) reproduced.insert(v);
    }
    if (reproduced.size() < realized.size()) return stats;
  }
  stats.verdict = true;
  return stats;
}

}  // namespace cfuse
