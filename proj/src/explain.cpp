#include "cfuse/explain.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace cfuse {

namespace {

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return value_less(a, b); }
};

std::vector<std::string> focus_names(const CausalModel& m, int slot) {
  std::vector<std::string> names;
  for (int g : m.focus_slots(slot)) names.push_back(m.name(g));
  return names;
}

int require_slot(const CausalModel& m, const std::string& var) {
  int s = m.index_of(var);
  if (s < 0)
    throw std::invalid_argument("variable '" + var + "' missing from model '" + m.id() + "'");
  return s;
}

}  // namespace

bool can_explain(const CausalModel& m1, const CausalModel& m2, const std::string& var,
                 ExplanationWitness* witness) {
  int s1 = require_slot(m1, var);
  int s2 = require_slot(m2, var);
  Budget budget;

  if (!(m1.range(s1) == m2.range(s2))) return false;

  // m2's focus of the target must sit inside m1's, and every intervention
  // value performable in m2 must be performable in m1.
  std::vector<std::string> g1 = focus_names(m1, s1);
  std::vector<std::string> g2 = focus_names(m2, s2);
  if (!std::includes(g1.begin(), g1.end(), g2.begin(), g2.end())) return false;

  std::vector<int> iv2, iv1;
  for (const std::string& g : g2) {
    int a2 = m2.index_of(g);
    int a1 = m1.index_of(g);
    iv2.push_back(a2);
    iv1.push_back(a1);
    for (const Value& v : m2.range(a2).values())
      if (!m1.range(a1).contains(v)) return false;
  }

  // Exogenous variables with no unblocked path to the target cannot change
  // it, so they stay at their range minimum and only the relevant ones are
  // enumerated. Relevance depends on the blocked set alone, which is the
  // same for every intervention value.
  std::vector<char> blocked2(m2.var_count(), 0), blocked1(m1.var_count(), 0);
  for (int s : iv2) blocked2[size_t(s)] = 1;
  for (int s : iv1) blocked1[size_t(s)] = 1;
  std::vector<int> rel2 = m2.relevant_exogenous(s2, blocked2, budget);
  std::vector<int> rel1 = m1.relevant_exogenous(s1, blocked1, budget);

  std::vector<char> pin2(m2.var_count(), 0), pin1(m1.var_count(), 0);
  for (int s : m2.exogenous_slots()) pin2[size_t(s)] = 1;
  for (int s : iv2) pin2[size_t(s)] = 1;
  for (int s : m1.exogenous_slots()) pin1[size_t(s)] = 1;
  for (int s : iv1) pin1[size_t(s)] = 1;

  std::vector<const Range*> iv_ranges, rel2_ranges, rel1_ranges;
  for (int s : iv2) iv_ranges.push_back(&m2.range(s));
  for (int s : rel2) rel2_ranges.push_back(&m2.range(s));
  for (int s : rel1) rel1_ranges.push_back(&m1.range(s));

  std::vector<Value> slots2, slots1;
  m2.init_slots(slots2);
  m1.init_slots(slots1);

  if (witness) {
    witness->target = var;
    witness->intervened = g2;
    witness->entries.clear();
  }

  Odometer iv_od(std::move(iv_ranges));
  while (iv_od.next()) {
    std::vector<Value> xs(iv2.size());
    for (size_t i = 0; i < iv2.size(); ++i) xs[i] = iv_od.value(i);

    // Values the explained model realizes under this intervention.
    std::set<Value, ValueLess> realized;
    for (size_t i = 0; i < iv2.size(); ++i) slots2[size_t(iv2[i])] = xs[i];
    {
      Odometer od(rel2_ranges);
      while (od.next()) {
        for (size_t i = 0; i < rel2.size(); ++i) slots2[size_t(rel2[i])] = od.value(i);
        m2.solve_slots(slots2, pin2, budget);
        realized.insert(slots2[size_t(s2)]);
      }
    }

    // Search the explaining model's contexts for each realized value. The
    // enumeration order is lexicographic over full contexts, so the first
    // hit per value is the least explaining context.
    std::map<Value, Context, ValueLess> found;
    for (size_t i = 0; i < iv1.size(); ++i) slots1[size_t(iv1[i])] = xs[i];
    Odometer od(rel1_ranges);
    while (found.size() < realized.size() && od.next()) {
      for (size_t i = 0; i < rel1.size(); ++i) slots1[size_t(rel1[i])] = od.value(i);
      m1.solve_slots(slots1, pin1, budget);
      const Value& v = slots1[size_t(s1)];
      if (realized.count(v) && !found.count(v)) found.emplace(v, m1.context_from_slots(slots1));
    }
    if (found.size() < realized.size()) return false;
    if (witness)
      for (const Value& c : realized) witness->entries.push_back({xs, c, found.at(c)});
  }
  return true;
}

bool witness_replays(const CausalModel& explainer, const ExplanationWitness& w) {
  int s = explainer.index_of(w.target);
  if (s < 0) return false;
  for (const auto& e : w.entries) {
    if (e.intervention.size() != w.intervened.size()) return false;
    if (explainer.is_exogenous(s)) {
      // satisfies() rejects exogenous primitives; an exogenous target just
      // reads its context entry (it is never intervened on, being outside
      // its own focus set).
      const Value* v = e.context.find(w.target);
      if (!v || !(*v == e.observed)) return false;
      continue;
    }
    CausalFormula phi;
    for (size_t i = 0; i < w.intervened.size(); ++i)
      phi.intervention.entries.emplace_back(w.intervened[i], e.intervention[i]);
    phi.body = FormulaBody::prim(w.target, e.observed);
    if (!explainer.satisfies(e.context, phi)) return false;
  }
  return true;
}

bool c_equivalent(const CausalModel& m1, const CausalModel& m2, const std::string& var) {
  int s1 = require_slot(m1, var);
  int s2 = require_slot(m2, var);
  if (m1.is_exogenous(s1) != m2.is_exogenous(s2)) return false;
  if (!(m1.range(s1) == m2.range(s2))) return false;
  if (focus_names(m1, s1) != focus_names(m2, s2)) return false;
  if (m1.is_exogenous(s1)) return true;

  Budget budget;
  const std::vector<int>& p1 = m1.parent_slots(s1, budget);
  const std::vector<int>& p2 = m2.parent_slots(s2, budget);
  std::vector<std::string> n1, n2;
  for (int p : p1) n1.push_back(m1.name(p));
  for (int p : p2) n2.push_back(m2.name(p));
  if (n1 != n2) return false;
  for (size_t i = 0; i < p1.size(); ++i)
    if (!(m1.range(p1[i]) == m2.range(p2[i]))) return false;

  // Same intervention table over the shared parents; non-parents cannot
  // change the value, so they sit at range minima throughout.
  std::vector<Value> v1, v2;
  m1.init_slots(v1);
  m2.init_slots(v2);
  std::vector<const Range*> ranges;
  for (int p : p1) ranges.push_back(&m1.range(p));
  Odometer od(std::move(ranges));
  while (od.next()) {
    budget.charge(2);
    for (size_t i = 0; i < p1.size(); ++i) {
      v1[size_t(p1[i])] = od.value(i);
      v2[size_t(p2[i])] = od.value(i);
    }
    if (!(eval(*m1.equation(s1), v1) == eval(*m2.equation(s2), v2))) return false;
  }
  return true;
}

bool c_compatible(const CausalModel& m1, const CausalModel& m2, const std::string& var) {
  return can_explain(m1, m2, var) || can_explain(m2, m1, var);
}

bool compatible(const CausalModel& m1, const CausalModel& m2) {
  for (const std::string& v : m1.variable_names())
    if (m2.has_variable(v) && !c_compatible(m1, m2, v)) return false;
  return true;
}

bool dominates(const CausalModel& m1, const CausalModel& m2) {
  for (const std::string& v : m2.variable_names()) {
    if (!m1.has_variable(v)) return false;
    if (!can_explain(m1, m2, v)) return false;
  }
  return true;
}

}  // namespace cfuse
