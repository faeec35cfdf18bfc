#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfuse/budget.hpp"
#include "cfuse/expr.hpp"
#include "cfuse/value.hpp"

namespace cfuse {

// Variable names are identifiers: letter or underscore, then letters,
// digits, underscores or primes, and not a language keyword.
bool valid_identifier(const std::string& name);

// A named rule violation. Parsing fills line/col; validation leaves them at
// the declaration site when known, 0 otherwise.
struct Diagnostic {
  std::string rule;
  std::string variable;
  std::string detail;
  int line = 0;
  int col = 0;

  std::string to_string() const;
};

struct Digraph {
  std::vector<std::string> nodes;        // sorted by name
  std::vector<std::vector<int>> out;     // adjacency lists, sorted

  bool has_edge(int from, int to) const;
  std::vector<std::pair<std::string, std::string>> edge_names() const;
};

// Kahn's algorithm; linear in nodes + edges.
bool is_acyclic(const Digraph& g);

// Total assignment to the exogenous variables, keyed by name.
class Context {
 public:
  Context() = default;

  void set(const std::string& name, Value v) { entries_[name] = v; }
  const Value* find(const std::string& name) const;
  size_t size() const { return entries_.size(); }
  const std::map<std::string, Value>& entries() const { return entries_; }
  std::string to_string() const;

  friend bool operator==(const Context&, const Context&) = default;

 private:
  std::map<std::string, Value> entries_;
};

// Ordered intervention prefix [Y1<-y1, ..., Yk<-yk]. Targets may be
// endogenous or exogenous; no variable may appear twice.
struct Intervention {
  std::vector<std::pair<std::string, Value>> entries;
};

// Boolean combination of primitive events X = x over endogenous variables.
struct FormulaBody {
  enum class Kind : uint8_t { Prim, And, Or, Not };

  Kind kind = Kind::Prim;
  std::string var;   // Prim
  Value value{};     // Prim
  std::vector<FormulaBody> kids;

  static FormulaBody prim(std::string var, Value v);
  static FormulaBody conj(FormulaBody a, FormulaBody b);
  static FormulaBody disj(FormulaBody a, FormulaBody b);
  static FormulaBody neg(FormulaBody a);
};

struct CausalFormula {
  Intervention intervention;
  FormulaBody body;
};

// Construction input for one variable of a model.
struct VariableDecl {
  std::string name;
  bool exogenous = false;
  Range range;
  std::optional<Expr> equation;                 // endogenous only
  std::optional<std::vector<std::string>> focus;  // omitted: defaults to the parents
};

// A causal model with focus: signature (exogenous/endogenous variables with
// finite ranges), one structural equation per endogenous variable, and a
// focus set per variable. Immutable after construction; parent and
// topological-order caches are computed lazily and shared by readers.
//
// Construction canonicalizes (variables sorted by name, focus sets sorted)
// and throws std::invalid_argument on structural problems: bad identifiers,
// duplicates, equations on exogenous variables or missing from endogenous
// ones, an equation mentioning its own variable, or unresolved names.
// Everything else (focus law, closure, acyclicity, range sizes) is reported
// by validate() so callers can collect diagnostics instead of catching.
class CausalModel {
 public:
  CausalModel(std::string id, std::vector<VariableDecl> decls);
  CausalModel(const CausalModel& other);
  CausalModel& operator=(const CausalModel& other);

  const std::string& id() const { return id_; }

  size_t var_count() const { return vars_.size(); }
  int index_of(const std::string& name) const;  // -1 when absent
  bool has_variable(const std::string& name) const { return index_of(name) >= 0; }
  const std::string& name(int slot) const { return vars_[size_t(slot)].name; }
  bool is_exogenous(int slot) const { return vars_[size_t(slot)].exogenous; }
  const Range& range(int slot) const { return vars_[size_t(slot)].range; }
  const Expr* equation(int slot) const;
  const std::vector<int>& focus_slots(int slot) const { return vars_[size_t(slot)].focus; }

  std::vector<std::string> variable_names() const;
  std::vector<std::string> exogenous_names() const;
  std::vector<std::string> endogenous_names() const;
  const std::vector<int>& exogenous_slots() const { return exo_slots_; }
  std::vector<std::string> focus(const std::string& var) const;

  // ---- operations ----

  // Diagnostics for every violated model invariant; empty means valid.
  std::vector<Diagnostic> validate() const;

  // Variables whose change can change this variable's equation value under
  // some setting of all others; exhaustive, cached. Exogenous: empty.
  std::vector<std::string> parents(const std::string& var) const;

  // Unique solution of the equations under context u, over all variables.
  std::map<std::string, Value> solve(const Context& u) const;

  // Same model with X's equation replaced by the constant x. X must be
  // endogenous (exogenous interventions happen in satisfies, via the
  // context); x must be in X's range.
  CausalModel intervene(const std::string& x_var, const Value& x) const;

  // (M, u) |= phi. Endogenous interventions rewrite equations, exogenous
  // ones rewrite the context entry; the body is evaluated on the solution.
  bool satisfies(const Context& u, const CausalFormula& phi) const;

  Digraph parent_graph() const;
  Digraph focus_graph() const;

  // ---- shared plumbing for the search modules ----

  // Cached parent slots of one variable; charges the caller's budget on the
  // first computation.
  const std::vector<int>& parent_slots(int slot, Budget& budget) const;

  // Endogenous slots in dependency order (parents first). Throws
  // std::logic_error if the parent graph is cyclic; run validate() first.
  const std::vector<int>& topo_order(Budget& budget) const;

  // Fills every slot with its range minimum, so unread slots are in-range.
  void init_slots(std::vector<Value>& slots) const;

  // Computes every unpinned endogenous slot in topological order. Pinned
  // slots (intervened, or exogenous values set by the caller) are kept.
  void solve_slots(std::span<Value> slots, const std::vector<char>& pinned, Budget& budget) const;

  void context_into_slots(const Context& u, std::span<Value> slots) const;
  Context context_from_slots(std::span<const Value> slots) const;

  // Exogenous slots that can reach `target` through parent edges without
  // passing through a pinned slot. Contexts differing only outside this set
  // give the target the same value under the pinned intervention.
  std::vector<int> relevant_exogenous(int target, const std::vector<char>& pinned,
                                      Budget& budget) const;

 private:
  struct Var {
    std::string name;
    bool exogenous = false;
    Range range;
    std::optional<Expr> equation;       // slots resolved against vars_
    std::vector<int> mentioned;         // slots referenced by the equation
    std::vector<int> focus;             // sorted slots
  };

  std::vector<int> compute_parents(int slot, Budget& budget) const;
  void check_formula(const CausalFormula& phi) const;
  bool eval_body(const FormulaBody& b, std::span<const Value> slots) const;

  std::string id_;
  std::vector<Var> vars_;               // sorted by name
  std::map<std::string, int> slot_of_;
  std::vector<int> exo_slots_;

  mutable std::mutex cache_mu_;
  mutable std::vector<std::optional<std::vector<int>>> parents_cache_;
  mutable std::optional<std::vector<int>> topo_cache_;
  mutable bool topo_cyclic_ = false;
};

// Odometer over a list of ranges, lexicographic in position order. Zero
// positions yield exactly one (empty) combination.
class Odometer {
 public:
  explicit Odometer(std::vector<const Range*> ranges);

  // Advances to the next combination; the first call selects the first one.
  bool next();
  size_t positions() const { return ranges_.size(); }
  const Value& value(size_t i) const { return ranges_[i]->values()[idx_[i]]; }

 private:
  std::vector<const Range*> ranges_;
  std::vector<size_t> idx_;
  bool fresh_ = true;
};

// True when the two models agree on every variable: same variable set, and
// per variable equal exogeneity, range, focus set and (for endogenous pairs)
// extensionally equal equations. This is the equality all algebraic laws are
// stated in, since combination copies syntax from one operand.
bool semantically_equal(const CausalModel& m1, const CausalModel& m2);

}  // namespace cfuse
