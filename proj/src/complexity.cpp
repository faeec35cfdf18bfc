#include "cfuse/complexity.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <set>
#include <stdexcept>

#include "cfuse/explain.hpp"

namespace cfuse {

// ============================================================
// Minimum set cover
// ============================================================

namespace {

struct Bits {
  std::vector<uint64_t> w;

  explicit Bits(size_t n = 0) : w((n + 63) / 64, 0) {}
  void set(size_t i) { w[i >> 6] |= uint64_t(1) << (i & 63); }
  bool test(size_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  bool none() const {
    for (uint64_t x : w)
      if (x) return false;
    return true;
  }
  bool intersects(const Bits& o) const {
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i] & o.w[i]) return true;
    return false;
  }
  bool contains(const Bits& o) const {
    for (size_t i = 0; i < w.size(); ++i)
      if (o.w[i] & ~w[i]) return false;
    return true;
  }
  void or_with(const Bits& o) {
    for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
  }
  void subtract(const Bits& o) {
    for (size_t i = 0; i < w.size(); ++i) w[i] &= ~o.w[i];
  }
  int first_set() const {
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i]) return int(i * 64 + size_t(std::countr_zero(w[i])));
    return -1;
  }
  friend bool operator==(const Bits&, const Bits&) = default;
};

// Branch on the first uncovered element: every cover picks some set
// containing it, so trying exactly those is complete.
void cover_size_search(const std::vector<Bits>& sets,
                       const std::vector<std::vector<int>>& covering, const Bits& uncovered,
                       size_t depth, size_t& best, Budget& budget) {
  if (uncovered.none()) {
    best = std::min(best, depth);
    return;
  }
  if (depth + 1 >= best) return;
  budget.charge();
  int e = uncovered.first_set();
  for (int s : covering[size_t(e)]) {
    Bits rest = uncovered;
    rest.subtract(sets[size_t(s)]);
    cover_size_search(sets, covering, rest, depth + 1, best, budget);
  }
}

// First depth-first cover over ascending set indices is the
// lexicographically least one of the target size.
bool lex_least_search(const std::vector<Bits>& sets, const std::vector<Bits>& suffix_union,
                      size_t start, size_t target, Bits uncovered, std::vector<int>& chosen,
                      Budget& budget) {
  if (uncovered.none()) return true;
  if (chosen.size() == target) return false;
  budget.charge();
  for (size_t i = start; i < sets.size(); ++i) {
    if (!suffix_union[i].contains(uncovered)) return false;
    if (!sets[i].intersects(uncovered)) continue;
    Bits rest = uncovered;
    rest.subtract(sets[i]);
    chosen.push_back(int(i));
    if (lex_least_search(sets, suffix_union, i + 1, target, std::move(rest), chosen, budget))
      return true;
    chosen.pop_back();
  }
  return false;
}

std::optional<std::vector<int>> min_cover_bits(size_t element_count, const std::vector<Bits>& sets,
                                               Budget& budget) {
  if (element_count == 0) return std::vector<int>{};

  Bits all(element_count);
  for (size_t i = 0; i < element_count; ++i) all.set(i);
  Bits reachable(element_count);
  for (const Bits& s : sets) reachable.or_with(s);
  if (!reachable.contains(all)) return std::nullopt;

  std::vector<std::vector<int>> covering(element_count);
  for (size_t s = 0; s < sets.size(); ++s)
    for (size_t e = 0; e < element_count; ++e)
      if (sets[s].test(e)) covering[e].push_back(int(s));

  size_t best = sets.size() + 1;
  cover_size_search(sets, covering, all, 0, best, budget);

  std::vector<Bits> suffix_union(sets.size() + 1, Bits(element_count));
  for (size_t i = sets.size(); i-- > 0;) {
    suffix_union[i] = suffix_union[i + 1];
    suffix_union[i].or_with(sets[i]);
  }
  std::vector<int> chosen;
  lex_least_search(sets, suffix_union, 0, best, all, chosen, budget);
  return chosen;
}

}  // namespace

std::optional<std::vector<int>> min_set_cover(size_t element_count,
                                              const std::vector<std::vector<int>>& sets,
                                              Budget& budget) {
  std::vector<Bits> bits;
  bits.reserve(sets.size());
  for (const auto& s : sets) {
    Bits b(element_count);
    for (int e : s) {
      if (e < 0 || size_t(e) >= element_count)
        throw std::invalid_argument("set element out of range");
      b.set(size_t(e));
    }
    bits.push_back(std::move(b));
  }
  return min_cover_bits(element_count, bits, budget);
}

std::optional<std::vector<int>> min_set_cover(size_t element_count,
                                              const std::vector<std::vector<int>>& sets) {
  Budget budget;
  return min_set_cover(element_count, sets, budget);
}

// ============================================================
// Realized behaviour tables
// ============================================================

namespace {

// Everything the explained model realizes at one variable, plus where the
// same interventions land in the explainer: the raw material for both
// complexity notions.
struct VarTable {
  std::string var;
  std::vector<int> iv_explained, iv_explainer;    // focus slots, per model
  std::vector<int> rel_explainer;                 // relevant exogenous slots
  std::vector<std::vector<Value>> xs;             // interventions, enumeration order
  std::vector<std::vector<Value>> realized;       // per intervention, ascending
  std::vector<size_t> base;                       // per intervention, first requirement index
  size_t req_count = 0;
};

VarTable realized_table(const CausalModel& explainer, const CausalModel& explained,
                        const std::string& var, Budget& budget) {
  VarTable t;
  t.var = var;
  int sx = explained.index_of(var);
  int se = explainer.index_of(var);
  for (int g : explained.focus_slots(sx)) {
    t.iv_explained.push_back(g);
    t.iv_explainer.push_back(explainer.index_of(explained.name(g)));
  }

  std::vector<char> blocked_x(explained.var_count(), 0), blocked_e(explainer.var_count(), 0);
  for (int s : t.iv_explained) blocked_x[size_t(s)] = 1;
  for (int s : t.iv_explainer) blocked_e[size_t(s)] = 1;
  std::vector<int> rel_x = explained.relevant_exogenous(sx, blocked_x, budget);
  t.rel_explainer = explainer.relevant_exogenous(se, blocked_e, budget);

  std::vector<char> pin(explained.var_count(), 0);
  for (int s : explained.exogenous_slots()) pin[size_t(s)] = 1;
  for (int s : t.iv_explained) pin[size_t(s)] = 1;

  std::vector<const Range*> iv_ranges, rel_ranges;
  for (int s : t.iv_explained) iv_ranges.push_back(&explained.range(s));
  for (int s : rel_x) rel_ranges.push_back(&explained.range(s));

  std::vector<Value> slots;
  explained.init_slots(slots);
  Odometer iv_od(std::move(iv_ranges));
  while (iv_od.next()) {
    std::vector<Value> xs(t.iv_explained.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      xs[i] = iv_od.value(i);
      slots[size_t(t.iv_explained[i])] = xs[i];
    }
    std::set<Value, decltype([](const Value& a, const Value& b) { return value_less(a, b); })>
        vals;
    Odometer od(rel_ranges);
    while (od.next()) {
      for (size_t i = 0; i < rel_x.size(); ++i) slots[size_t(rel_x[i])] = od.value(i);
      explained.solve_slots(slots, pin, budget);
      vals.insert(slots[size_t(sx)]);
    }
    t.base.push_back(t.req_count);
    t.req_count += vals.size();
    t.xs.push_back(std::move(xs));
    t.realized.emplace_back(vals.begin(), vals.end());
  }
  return t;
}

// Minimum number of explainer contexts covering every requirement of the
// given tables at once. Contexts agreeing on the union of the relevant
// exogenous slots cover the same requirements, so one representative per
// class (others at range minimum) is enumerated.
struct PooledCover {
  uint64_t size = 0;
  std::vector<Context> contexts;
};

std::optional<PooledCover> pooled_cover(const CausalModel& explainer,
                                        const std::vector<const VarTable*>& tables,
                                        Budget& budget) {
  size_t total_reqs = 0;
  std::set<int> pooled;
  for (const VarTable* t : tables) {
    total_reqs += t->req_count;
    pooled.insert(t->rel_explainer.begin(), t->rel_explainer.end());
  }
  std::vector<int> rel(pooled.begin(), pooled.end());
  std::vector<const Range*> rel_ranges;
  for (int s : rel) rel_ranges.push_back(&explainer.range(s));

  std::vector<Bits> sets;
  std::vector<Context> reps;
  std::vector<Value> slots;
  explainer.init_slots(slots);

  Odometer od(std::move(rel_ranges));
  while (od.next()) {
    Bits bits(total_reqs);
    size_t offset = 0;
    for (const VarTable* t : tables) {
      int se = explainer.index_of(t->var);
      std::vector<char> pin(explainer.var_count(), 0);
      for (int s : explainer.exogenous_slots()) pin[size_t(s)] = 1;
      for (int s : t->iv_explainer) pin[size_t(s)] = 1;
      for (size_t j = 0; j < t->xs.size(); ++j) {
        // Reset the exogenous part: minima, then the class values, then the
        // intervention; earlier tables may have disturbed any of them.
        for (int s : explainer.exogenous_slots())
          slots[size_t(s)] = explainer.range(s).values()[0];
        for (size_t i = 0; i < rel.size(); ++i) slots[size_t(rel[i])] = od.value(i);
        for (size_t i = 0; i < t->iv_explainer.size(); ++i)
          slots[size_t(t->iv_explainer[i])] = t->xs[j][i];
        explainer.solve_slots(slots, pin, budget);
        const Value& v = slots[size_t(se)];
        const auto& vals = t->realized[j];
        auto it = std::lower_bound(vals.begin(), vals.end(), v, value_less);
        if (it != vals.end() && *it == v)
          bits.set(offset + t->base[j] + size_t(it - vals.begin()));
      }
      offset += t->req_count;
    }
    bool dup = false;
    for (const Bits& b : sets)
      if (b == bits) {
        dup = true;
        break;
      }
    if (!dup) {
      sets.push_back(std::move(bits));
      Context u;
      for (int s : explainer.exogenous_slots()) u.set(explainer.name(s), explainer.range(s).values()[0]);
      for (size_t i = 0; i < rel.size(); ++i) u.set(explainer.name(rel[i]), od.value(i));
      reps.push_back(std::move(u));
    }
  }

  auto cover = min_cover_bits(total_reqs, sets, budget);
  if (!cover) return std::nullopt;
  PooledCover out;
  out.size = cover->size();
  for (int idx : *cover) out.contexts.push_back(reps[size_t(idx)]);
  return out;
}

}  // namespace

// ============================================================
// Public operations
// ============================================================

std::vector<Requirement> explanation_requirements(const CausalModel& m1, const CausalModel& m2,
                                                  const std::string& var) {
  if (m2.index_of(var) < 0 || m1.index_of(var) < 0)
    throw std::invalid_argument("variable '" + var + "' missing from a model");
  Budget budget;
  VarTable t = realized_table(m1, m2, var, budget);
  std::vector<Requirement> reqs;
  reqs.reserve(t.req_count);
  for (size_t j = 0; j < t.xs.size(); ++j) {
    for (const Value& v : t.realized[j]) {
      Requirement r;
      r.explainer = m1.id();
      r.explained = m2.id();
      r.target = var;
      for (size_t i = 0; i < t.iv_explained.size(); ++i)
        r.intervention.emplace_back(m2.name(t.iv_explained[i]), t.xs[j][i]);
      r.value = v;
      reqs.push_back(std::move(r));
    }
  }
  return reqs;
}

std::optional<ComplexityResult> explanation_complexity(const CausalModel& m1,
                                                       const CausalModel& m2,
                                                       const std::string& var) {
  if (!can_explain(m1, m2, var)) return std::nullopt;
  Budget budget;
  VarTable t = realized_table(m1, m2, var, budget);
  auto cover = pooled_cover(m1, {&t}, budget);
  if (!cover) return std::nullopt;  // unreachable once can_explain held
  ComplexityResult result;
  result.cardinality = cover->size;
  for (Context& u : cover->contexts) result.witness.emplace_back(m1.id(), std::move(u));
  result.direction[var] = m1.id();
  return result;
}

std::optional<ComplexityResult> combination_complexity(const CausalModel& m1,
                                                       const CausalModel& m2) {
  std::vector<std::string> shared;
  for (const std::string& v : m1.variable_names())
    if (m2.has_variable(v)) shared.push_back(v);

  Budget budget;
  // For each shared variable, which directions hold: bit 0 = m1 explains m2.
  std::vector<std::string> forced1, forced2, both;
  std::map<std::string, VarTable> table1, table2;  // keyed by variable
  for (const std::string& v : shared) {
    bool d12 = can_explain(m1, m2, v);
    bool d21 = can_explain(m2, m1, v);
    if (!d12 && !d21) return std::nullopt;
    if (d12) table1.emplace(v, realized_table(m1, m2, v, budget));
    if (d21) table2.emplace(v, realized_table(m2, m1, v, budget));
    if (d12 && d21)
      both.push_back(v);
    else if (d12)
      forced1.push_back(v);
    else
      forced2.push_back(v);
  }

  std::optional<ComplexityResult> best;
  for (uint64_t mask = 0; mask < (uint64_t(1) << both.size()); ++mask) {
    std::vector<const VarTable*> side1, side2;
    std::map<std::string, std::string> direction;
    for (const std::string& v : forced1) {
      side1.push_back(&table1.at(v));
      direction[v] = m1.id();
    }
    for (const std::string& v : forced2) {
      side2.push_back(&table2.at(v));
      direction[v] = m2.id();
    }
    for (size_t i = 0; i < both.size(); ++i) {
      if (mask & (uint64_t(1) << i)) {
        side2.push_back(&table2.at(both[i]));
        direction[both[i]] = m2.id();
      } else {
        side1.push_back(&table1.at(both[i]));
        direction[both[i]] = m1.id();
      }
    }
    auto c1 = pooled_cover(m1, side1, budget);
    auto c2 = pooled_cover(m2, side2, budget);
    if (!c1 || !c2) continue;  // unreachable: directions were verified
    uint64_t total = c1->size + c2->size;
    if (best && best->cardinality <= total) continue;
    ComplexityResult r;
    r.cardinality = total;
    for (Context& u : c1->contexts) r.witness.emplace_back(m1.id(), std::move(u));
    for (Context& u : c2->contexts) r.witness.emplace_back(m2.id(), std::move(u));
    r.direction = std::move(direction);
    best = std::move(r);
  }
  return best;
}

}  // namespace cfuse
