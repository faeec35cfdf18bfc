#include "cfuse/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cfuse {

namespace {

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "model", "exogenous", "endogenous", "focus", "if",     "then",
      "else",  "min",       "max",        "true",  "false",  "forall",
      "exists"};
  return words;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool ident_tail(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

bool valid_identifier(const std::string& name) {
  if (name.empty() || !ident_start(name[0])) return false;
  for (size_t i = 1; i < name.size(); ++i)
    if (!ident_tail(name[i])) return false;
  return !reserved_words().count(name);
}

// ============================================================
// Diagnostic / Digraph
// ============================================================

std::string Diagnostic::to_string() const {
  std::ostringstream out;
  out << rule;
  if (!variable.empty()) out << "(" << variable << ")";
  out << ": " << detail;
  if (line > 0) out << " at " << line << ":" << col;
  return out.str();
}

bool Digraph::has_edge(int from, int to) const {
  const auto& row = out[size_t(from)];
  return std::binary_search(row.begin(), row.end(), to);
}

std::vector<std::pair<std::string, std::string>> Digraph::edge_names() const {
  std::vector<std::pair<std::string, std::string>> result;
  for (size_t i = 0; i < out.size(); ++i)
    for (int j : out[i]) result.emplace_back(nodes[i], nodes[size_t(j)]);
  return result;
}

bool is_acyclic(const Digraph& g) {
  std::vector<int> in_deg(g.nodes.size(), 0);
  for (const auto& row : g.out)
    for (int j : row) ++in_deg[size_t(j)];
  std::vector<int> ready;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    if (in_deg[i] == 0) ready.push_back(int(i));
  size_t seen = 0;
  while (!ready.empty()) {
    int n = ready.back();
    ready.pop_back();
    ++seen;
    for (int j : g.out[size_t(n)])
      if (--in_deg[size_t(j)] == 0) ready.push_back(j);
  }
  return seen == g.nodes.size();
}

// ============================================================
// Context / formulas
// ============================================================

const Value* Context::find(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string Context::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, v] : entries_) {
    if (!first) out << ", ";
    first = false;
    out << name << "=" << v.to_string();
  }
  return out.str();
}

FormulaBody FormulaBody::prim(std::string var, Value v) {
  FormulaBody b;
  b.kind = Kind::Prim;
  b.var = std::move(var);
  b.value = v;
  return b;
}

FormulaBody FormulaBody::conj(FormulaBody a, FormulaBody b) {
  FormulaBody r;
  r.kind = Kind::And;
  r.kids.push_back(std::move(a));
  r.kids.push_back(std::move(b));
  return r;
}

FormulaBody FormulaBody::disj(FormulaBody a, FormulaBody b) {
  FormulaBody r;
  r.kind = Kind::Or;
  r.kids.push_back(std::move(a));
  r.kids.push_back(std::move(b));
  return r;
}

FormulaBody FormulaBody::neg(FormulaBody a) {
  FormulaBody r;
  r.kind = Kind::Not;
  r.kids.push_back(std::move(a));
  return r;
}

// ============================================================
// CausalModel: construction
// ============================================================

CausalModel::CausalModel(std::string id, std::vector<VariableDecl> decls)
    : id_(std::move(id)) {
  if (id_.empty()) throw std::invalid_argument("model id must be nonempty");
  std::sort(decls.begin(), decls.end(),
            [](const VariableDecl& a, const VariableDecl& b) { return a.name < b.name; });

  vars_.reserve(decls.size());
  for (auto& d : decls) {
    if (!valid_identifier(d.name))
      throw std::invalid_argument("bad variable name '" + d.name + "'");
    if (slot_of_.count(d.name))
      throw std::invalid_argument("duplicate variable '" + d.name + "'");
    if (d.range.size() == 0)
      throw std::invalid_argument("variable '" + d.name + "' has an empty range");
    if (d.exogenous && d.equation)
      throw std::invalid_argument("exogenous variable '" + d.name + "' has an equation");
    if (!d.exogenous && !d.equation)
      throw std::invalid_argument("endogenous variable '" + d.name + "' lacks an equation");
    slot_of_[d.name] = int(vars_.size());
    Var v;
    v.name = d.name;
    v.exogenous = d.exogenous;
    v.range = d.range;
    v.equation = std::move(d.equation);
    vars_.push_back(std::move(v));
    if (d.exogenous) exo_slots_.push_back(int(vars_.size()) - 1);
  }

  // Resolve equation variable references now that the slot layout is fixed.
  for (auto& v : vars_) {
    if (!v.equation) continue;
    resolve_slots(*v.equation, [&](const std::string& name) {
      auto it = slot_of_.find(name);
      return it == slot_of_.end() ? -1 : it->second;
    });
    for (const std::string& m : mentioned_variables(*v.equation)) {
      if (m == v.name)
        throw std::invalid_argument("equation of '" + v.name + "' mentions itself");
      v.mentioned.push_back(slot_of_.at(m));
    }
  }

  // Focus sets: explicit ones are resolved and sorted; omitted ones default
  // to the parents (or, if the equation cannot even be evaluated, to the
  // mentioned variables; validate() will flag the closure problem anyway).
  parents_cache_.resize(vars_.size());
  for (size_t i = 0; i < decls.size(); ++i) {
    Var& v = vars_[i];
    if (decls[i].focus) {
      std::set<int> slots;
      for (const std::string& g : *decls[i].focus) {
        auto it = slot_of_.find(g);
        if (it == slot_of_.end())
          throw std::invalid_argument("focus of '" + v.name + "' names unknown variable '" + g +
                                      "'");
        slots.insert(it->second);
      }
      v.focus.assign(slots.begin(), slots.end());
    } else if (!v.exogenous) {
      Budget budget;
      try {
        v.focus = compute_parents(int(i), budget);
      } catch (const EvalError&) {
        v.focus = v.mentioned;
      }
    }
  }
}

CausalModel::CausalModel(const CausalModel& other)
    : id_(other.id_),
      vars_(other.vars_),
      slot_of_(other.slot_of_),
      exo_slots_(other.exo_slots_) {
  std::lock_guard<std::mutex> lk(other.cache_mu_);
  parents_cache_ = other.parents_cache_;
  topo_cache_ = other.topo_cache_;
  topo_cyclic_ = other.topo_cyclic_;
}

CausalModel& CausalModel::operator=(const CausalModel& other) {
  if (this == &other) return *this;
  CausalModel tmp(other);
  id_ = std::move(tmp.id_);
  vars_ = std::move(tmp.vars_);
  slot_of_ = std::move(tmp.slot_of_);
  exo_slots_ = std::move(tmp.exo_slots_);
  parents_cache_ = std::move(tmp.parents_cache_);
  topo_cache_ = std::move(tmp.topo_cache_);
  topo_cyclic_ = tmp.topo_cyclic_;
  return *this;
}

int CausalModel::index_of(const std::string& name) const {
  auto it = slot_of_.find(name);
  return it == slot_of_.end() ? -1 : it->second;
}

const Expr* CausalModel::equation(int slot) const {
  const auto& eq = vars_[size_t(slot)].equation;
  return eq ? &*eq : nullptr;
}

std::vector<std::string> CausalModel::variable_names() const {
  std::vector<std::string> names;
  names.reserve(vars_.size());
  for (const auto& v : vars_) names.push_back(v.name);
  return names;
}

std::vector<std::string> CausalModel::exogenous_names() const {
  std::vector<std::string> names;
  for (int s : exo_slots_) names.push_back(vars_[size_t(s)].name);
  return names;
}

std::vector<std::string> CausalModel::endogenous_names() const {
  std::vector<std::string> names;
  for (const auto& v : vars_)
    if (!v.exogenous) names.push_back(v.name);
  return names;
}

std::vector<std::string> CausalModel::focus(const std::string& var) const {
  int s = index_of(var);
  if (s < 0) throw std::invalid_argument("unknown variable '" + var + "'");
  std::vector<std::string> names;
  for (int g : vars_[size_t(s)].focus) names.push_back(vars_[size_t(g)].name);
  return names;
}

// ============================================================
// Parents
// ============================================================

// B is a parent of C when flipping B's value changes C's equation under some
// setting of the other mentioned variables. Unmentioned variables cannot
// matter, so the search runs over the mentioned set only.
std::vector<int> CausalModel::compute_parents(int slot, Budget& budget) const {
  const Var& v = vars_[size_t(slot)];
  std::vector<int> result;
  if (!v.equation) return result;

  std::vector<Value> slots;
  init_slots(slots);
  for (int cand : v.mentioned) {
    std::vector<int> others;
    for (int m : v.mentioned)
      if (m != cand) others.push_back(m);
    std::vector<const Range*> ranges;
    ranges.reserve(others.size());
    for (int o : others) ranges.push_back(&vars_[size_t(o)].range);

    const Range& cand_range = vars_[size_t(cand)].range;
    bool is_parent = false;
    Odometer od(std::move(ranges));
    while (!is_parent && od.next()) {
      for (size_t i = 0; i < others.size(); ++i) slots[size_t(others[i])] = od.value(i);
      budget.charge(cand_range.size());
      slots[size_t(cand)] = cand_range.values()[0];
      Value first = eval(*v.equation, slots);
      for (size_t k = 1; k < cand_range.size(); ++k) {
        slots[size_t(cand)] = cand_range.values()[k];
        if (!(eval(*v.equation, slots) == first)) {
          is_parent = true;
          break;
        }
      }
    }
    if (is_parent) result.push_back(cand);
    // Reset the probed slots so later candidates start from range minima.
    for (int m : v.mentioned) slots[size_t(m)] = vars_[size_t(m)].range.values()[0];
  }
  return result;
}

const std::vector<int>& CausalModel::parent_slots(int slot, Budget& budget) const {
  {
    std::lock_guard<std::mutex> lk(cache_mu_);
    if (parents_cache_[size_t(slot)]) return *parents_cache_[size_t(slot)];
  }
  std::vector<int> computed = compute_parents(slot, budget);
  std::lock_guard<std::mutex> lk(cache_mu_);
  if (!parents_cache_[size_t(slot)]) parents_cache_[size_t(slot)] = std::move(computed);
  return *parents_cache_[size_t(slot)];
}

std::vector<std::string> CausalModel::parents(const std::string& var) const {
  int s = index_of(var);
  if (s < 0) throw std::invalid_argument("unknown variable '" + var + "'");
  Budget budget;
  std::vector<std::string> names;
  for (int p : parent_slots(s, budget)) names.push_back(vars_[size_t(p)].name);
  return names;
}

const std::vector<int>& CausalModel::topo_order(Budget& budget) const {
  {
    std::lock_guard<std::mutex> lk(cache_mu_);
    if (topo_cache_) {
      if (topo_cyclic_) throw std::logic_error("parent graph of '" + id_ + "' is cyclic");
      return *topo_cache_;
    }
  }

  // Kahn over endogenous nodes; exogenous parents impose no ordering. Ties
  // go to the smallest slot so the order is deterministic.
  std::vector<std::vector<int>> children(vars_.size());
  std::vector<int> in_deg(vars_.size(), 0);
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].exogenous) continue;
    for (int p : parent_slots(int(i), budget)) {
      if (vars_[size_t(p)].exogenous) continue;
      children[size_t(p)].push_back(int(i));
      ++in_deg[i];
    }
  }
  std::set<int> ready;
  for (size_t i = 0; i < vars_.size(); ++i)
    if (!vars_[i].exogenous && in_deg[i] == 0) ready.insert(int(i));
  std::vector<int> order;
  while (!ready.empty()) {
    int n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    for (int c : children[size_t(n)])
      if (--in_deg[size_t(c)] == 0) ready.insert(c);
  }

  size_t endo_count = vars_.size() - exo_slots_.size();
  bool cyclic = order.size() < endo_count;
  std::lock_guard<std::mutex> lk(cache_mu_);
  if (!topo_cache_) {
    topo_cyclic_ = cyclic;
    topo_cache_ = cyclic ? std::vector<int>{} : std::move(order);
  }
  if (topo_cyclic_) throw std::logic_error("parent graph of '" + id_ + "' is cyclic");
  return *topo_cache_;
}

// ============================================================
// Solving
// ============================================================

void CausalModel::init_slots(std::vector<Value>& slots) const {
  slots.resize(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) slots[i] = vars_[i].range.values()[0];
}

void CausalModel::solve_slots(std::span<Value> slots, const std::vector<char>& pinned,
                              Budget& budget) const {
  for (int e : topo_order(budget)) {
    if (pinned[size_t(e)]) continue;
    budget.charge();
    slots[size_t(e)] = eval(*vars_[size_t(e)].equation, slots);
  }
}

void CausalModel::context_into_slots(const Context& u, std::span<Value> slots) const {
  for (int s : exo_slots_) {
    const Value* v = u.find(vars_[size_t(s)].name);
    if (!v)
      throw std::invalid_argument("context misses exogenous variable '" + vars_[size_t(s)].name +
                                  "'");
    if (!vars_[size_t(s)].range.contains(*v))
      throw std::invalid_argument("context value " + v->to_string() + " outside range of '" +
                                  vars_[size_t(s)].name + "'");
    slots[size_t(s)] = *v;
  }
  for (const auto& [name, v] : u.entries()) {
    int s = index_of(name);
    if (s < 0 || !vars_[size_t(s)].exogenous)
      throw std::invalid_argument("context assigns non-exogenous name '" + name + "'");
  }
}

Context CausalModel::context_from_slots(std::span<const Value> slots) const {
  Context u;
  for (int s : exo_slots_) u.set(vars_[size_t(s)].name, slots[size_t(s)]);
  return u;
}

std::map<std::string, Value> CausalModel::solve(const Context& u) const {
  Budget budget;
  std::vector<Value> slots;
  init_slots(slots);
  context_into_slots(u, slots);
  std::vector<char> pinned(vars_.size(), 0);
  for (int s : exo_slots_) pinned[size_t(s)] = 1;
  solve_slots(slots, pinned, budget);
  std::map<std::string, Value> result;
  for (size_t i = 0; i < vars_.size(); ++i) result[vars_[i].name] = slots[i];
  return result;
}

CausalModel CausalModel::intervene(const std::string& x_var, const Value& x) const {
  int s = index_of(x_var);
  if (s < 0) throw std::invalid_argument("unknown variable '" + x_var + "'");
  if (vars_[size_t(s)].exogenous)
    throw std::invalid_argument("cannot intervene on exogenous variable '" + x_var +
                                "'; set it in the context");
  if (!vars_[size_t(s)].range.contains(x))
    throw std::invalid_argument("intervention value " + x.to_string() + " outside range of '" +
                                x_var + "'");
  std::vector<VariableDecl> decls;
  decls.reserve(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    const Var& v = vars_[i];
    VariableDecl d;
    d.name = v.name;
    d.exogenous = v.exogenous;
    d.range = v.range;
    d.equation = (int(i) == s) ? std::optional<Expr>(Expr::literal(x)) : v.equation;
    std::vector<std::string> focus_names;
    for (int g : v.focus) focus_names.push_back(vars_[size_t(g)].name);
    d.focus = std::move(focus_names);
    decls.push_back(std::move(d));
  }
  return CausalModel(id_, std::move(decls));
}

// ============================================================
// Formula satisfaction
// ============================================================

void CausalModel::check_formula(const CausalFormula& phi) const {
  std::set<std::string> seen;
  for (const auto& [name, v] : phi.intervention.entries) {
    int s = index_of(name);
    if (s < 0) throw std::invalid_argument("intervention on unknown variable '" + name + "'");
    if (!vars_[size_t(s)].range.contains(v))
      throw std::invalid_argument("intervention value " + v.to_string() + " outside range of '" +
                                  name + "'");
    if (!seen.insert(name).second)
      throw std::invalid_argument("variable '" + name + "' intervened on twice");
  }
  // Primitive events must be endogenous: exogenous values are fixed by the
  // context, so observing them says nothing about the equations.
  std::vector<const FormulaBody*> stack = {&phi.body};
  while (!stack.empty()) {
    const FormulaBody* b = stack.back();
    stack.pop_back();
    if (b->kind == FormulaBody::Kind::Prim) {
      int s = index_of(b->var);
      if (s < 0) throw std::invalid_argument("formula names unknown variable '" + b->var + "'");
      if (vars_[size_t(s)].exogenous)
        throw std::invalid_argument("formula names exogenous variable '" + b->var + "'");
      if (!vars_[size_t(s)].range.contains(b->value))
        throw std::invalid_argument("formula value " + b->value.to_string() +
                                    " outside range of '" + b->var + "'");
    } else {
      for (const auto& k : b->kids) stack.push_back(&k);
    }
  }
}

bool CausalModel::eval_body(const FormulaBody& b, std::span<const Value> slots) const {
  switch (b.kind) {
    case FormulaBody::Kind::Prim:
      return slots[size_t(index_of(b.var))] == b.value;
    case FormulaBody::Kind::And:
      return eval_body(b.kids[0], slots) && eval_body(b.kids[1], slots);
    case FormulaBody::Kind::Or:
      return eval_body(b.kids[0], slots) || eval_body(b.kids[1], slots);
    case FormulaBody::Kind::Not:
      return !eval_body(b.kids[0], slots);
  }
  return false;
}

bool CausalModel::satisfies(const Context& u, const CausalFormula& phi) const {
  check_formula(phi);
  Budget budget;
  std::vector<Value> slots;
  init_slots(slots);
  context_into_slots(u, slots);
  std::vector<char> pinned(vars_.size(), 0);
  for (int s : exo_slots_) pinned[size_t(s)] = 1;
  // Exogenous interventions replace the context entry; endogenous ones pin
  // the slot so solve_slots leaves it alone.
  for (const auto& [name, v] : phi.intervention.entries) {
    int s = index_of(name);
    slots[size_t(s)] = v;
    pinned[size_t(s)] = 1;
  }
  solve_slots(slots, pinned, budget);
  return eval_body(phi.body, slots);
}

// ============================================================
// Graphs and validation
// ============================================================

Digraph CausalModel::parent_graph() const {
  Budget budget;
  Digraph g;
  g.nodes = variable_names();
  g.out.resize(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].exogenous) continue;
    for (int p : parent_slots(int(i), budget)) g.out[size_t(p)].push_back(int(i));
  }
  for (auto& row : g.out) std::sort(row.begin(), row.end());
  return g;
}

Digraph CausalModel::focus_graph() const {
  Digraph g;
  g.nodes = variable_names();
  g.out.resize(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i)
    for (int f : vars_[i].focus) g.out[size_t(f)].push_back(int(i));
  for (auto& row : g.out) std::sort(row.begin(), row.end());
  return g;
}

std::vector<Diagnostic> CausalModel::validate() const {
  std::vector<Diagnostic> diags;
  Budget budget;

  for (const auto& v : vars_) {
    if (v.range.size() < 2)
      diags.push_back({"range-too-small", v.name,
                       "range has 1 value; every variable needs at least 2"});
  }

  // Closure: every equation must evaluate without error and land inside its
  // variable's range for all in-range settings of the mentioned variables.
  std::vector<char> closure_ok(vars_.size(), 1);
  std::vector<Value> slots;
  init_slots(slots);
  for (size_t i = 0; i < vars_.size(); ++i) {
    const Var& v = vars_[i];
    if (!v.equation) continue;
    std::vector<const Range*> ranges;
    for (int m : v.mentioned) ranges.push_back(&vars_[size_t(m)].range);
    Odometer od(std::move(ranges));
    while (od.next()) {
      budget.charge();
      for (size_t k = 0; k < v.mentioned.size(); ++k)
        slots[size_t(v.mentioned[k])] = od.value(k);
      std::string problem;
      try {
        Value out = eval(*v.equation, slots);
        if (!v.range.contains(out))
          problem = "value " + out.to_string() + " outside the declared range";
      } catch (const EvalError& e) {
        problem = e.what();
      }
      if (!problem.empty()) {
        std::ostringstream at;
        for (size_t k = 0; k < v.mentioned.size(); ++k) {
          if (k) at << ", ";
          at << vars_[size_t(v.mentioned[k])].name << "=" << od.value(k).to_string();
        }
        diags.push_back({"closure-failure", v.name, problem + " at " + at.str()});
        closure_ok[i] = 0;
        break;
      }
    }
    for (int m : v.mentioned) slots[size_t(m)] = vars_[size_t(m)].range.values()[0];
  }

  // Focus law: no self-focus, and parents of closure-clean variables must be
  // focused on.
  for (size_t i = 0; i < vars_.size(); ++i) {
    const Var& v = vars_[i];
    if (std::binary_search(v.focus.begin(), v.focus.end(), int(i)))
      diags.push_back({"self-focus", v.name, "a variable may not appear in its own focus set"});
    if (v.exogenous || !closure_ok[i]) continue;
    for (int p : parent_slots(int(i), budget)) {
      if (!std::binary_search(v.focus.begin(), v.focus.end(), p))
        diags.push_back({"parent-not-in-focus", v.name,
                         "parent " + vars_[size_t(p)].name + " is missing from the focus set"});
    }
  }

  // Acyclicity of the parent graph, over the closure-clean part.
  bool all_clean = true;
  for (char c : closure_ok) all_clean = all_clean && c;
  if (all_clean) {
    try {
      topo_order(budget);
    } catch (const std::logic_error&) {
      Digraph g = parent_graph();
      std::ostringstream detail;
      detail << "parent graph has a cycle among:";
      // Kahn residue: nodes left with positive in-degree sit on or feed a cycle.
      std::vector<int> in_deg(g.nodes.size(), 0);
      for (const auto& row : g.out)
        for (int j : row) ++in_deg[size_t(j)];
      std::vector<int> ready;
      for (size_t i = 0; i < g.nodes.size(); ++i)
        if (in_deg[i] == 0) ready.push_back(int(i));
      while (!ready.empty()) {
        int n = ready.back();
        ready.pop_back();
        in_deg[size_t(n)] = -1;
        for (int j : g.out[size_t(n)])
          if (--in_deg[size_t(j)] == 0) ready.push_back(j);
      }
      for (size_t i = 0; i < g.nodes.size(); ++i)
        if (in_deg[i] > 0) detail << " " << g.nodes[i];
      diags.push_back({"cyclic-parent-graph", "", detail.str()});
    }
  }
  return diags;
}

// ============================================================
// Relevance
// ============================================================

std::vector<int> CausalModel::relevant_exogenous(int target, const std::vector<char>& pinned,
                                                 Budget& budget) const {
  std::vector<int> result;
  if (pinned[size_t(target)]) return result;
  std::vector<char> visited(vars_.size(), 0);
  std::vector<int> stack = {target};
  visited[size_t(target)] = 1;
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (vars_[size_t(n)].exogenous) {
      result.push_back(n);
      continue;
    }
    for (int p : parent_slots(n, budget)) {
      if (visited[size_t(p)] || pinned[size_t(p)]) continue;
      visited[size_t(p)] = 1;
      stack.push_back(p);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

// ============================================================
// Odometer
// ============================================================

Odometer::Odometer(std::vector<const Range*> ranges) : ranges_(std::move(ranges)) {
  idx_.assign(ranges_.size(), 0);
}

bool Odometer::next() {
  if (fresh_) {
    fresh_ = false;
    return true;
  }
  for (size_t i = ranges_.size(); i-- > 0;) {
    if (++idx_[i] < ranges_[i]->size()) return true;
    idx_[i] = 0;
  }
  return false;
}

// ============================================================
// Semantic equality
// ============================================================

namespace {

// Equations compare extensionally over the union of the variables either
// side mentions; agreeing there forces equal parent sets and equal induced
// functions.
bool equations_agree(const CausalModel& m1, int s1, const CausalModel& m2, int s2,
                     Budget& budget) {
  std::set<std::string> names;
  for (const std::string& n : mentioned_variables(*m1.equation(s1))) names.insert(n);
  for (const std::string& n : mentioned_variables(*m2.equation(s2))) names.insert(n);

  std::vector<int> slots1, slots2;
  std::vector<const Range*> ranges;
  for (const std::string& n : names) {
    int a = m1.index_of(n);
    int b = m2.index_of(n);
    if (a < 0 || b < 0 || !(m1.range(a) == m2.range(b))) return false;
    slots1.push_back(a);
    slots2.push_back(b);
    ranges.push_back(&m1.range(a));
  }

  std::vector<Value> v1, v2;
  m1.init_slots(v1);
  m2.init_slots(v2);
  Odometer od(std::move(ranges));
  while (od.next()) {
    budget.charge(2);
    for (size_t i = 0; i < slots1.size(); ++i) {
      v1[size_t(slots1[i])] = od.value(i);
      v2[size_t(slots2[i])] = od.value(i);
    }
    try {
      if (!(eval(*m1.equation(s1), v1) == eval(*m2.equation(s2), v2))) return false;
    } catch (const EvalError&) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool semantically_equal(const CausalModel& m1, const CausalModel& m2) {
  if (m1.var_count() != m2.var_count()) return false;
  Budget budget;
  for (size_t i = 0; i < m1.var_count(); ++i) {
    int s1 = int(i);
    int s2 = m2.index_of(m1.name(s1));
    if (s2 < 0) return false;
    if (m1.is_exogenous(s1) != m2.is_exogenous(s2)) return false;
    if (!(m1.range(s1) == m2.range(s2))) return false;
    std::vector<std::string> f1, f2;
    for (int g : m1.focus_slots(s1)) f1.push_back(m1.name(g));
    for (int g : m2.focus_slots(s2)) f2.push_back(m2.name(g));
    if (f1 != f2) return false;
    if (!m1.is_exogenous(s1) && !equations_agree(m1, s1, m2, s2, budget)) return false;
  }
  return true;
}

}  // namespace cfuse
