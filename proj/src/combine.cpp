#include "cfuse/combine.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <set>
#include <stdexcept>

#include "cfuse/explain.hpp"

namespace cfuse {

namespace {

std::string first_incompatible_var(const CausalModel& a, const CausalModel& b) {
  for (const std::string& v : a.variable_names())
    if (b.has_variable(v) && !c_compatible(a, b, v)) return v;
  return "";
}

VariableDecl decl_from(const CausalModel& m, int slot) {
  VariableDecl d;
  d.name = m.name(slot);
  d.exogenous = m.is_exogenous(slot);
  d.range = m.range(slot);
  if (const Expr* eq = m.equation(slot)) d.equation = *eq;
  std::vector<std::string> focus_names;
  for (int g : m.focus_slots(slot)) focus_names.push_back(m.name(g));
  d.focus = std::move(focus_names);
  return d;
}

CombinedModel trivial_combined(const CausalModel& m) {
  CombinedModel cm{m, {}};
  for (const std::string& v : m.variable_names()) cm.provenance[v] = m.id();
  return cm;
}

}  // namespace

std::string CombineError::to_string() const {
  switch (kind) {
    case Kind::Incompatible:
      return "incompatible(" + variable + ")";
    case Kind::CyclicCombination:
      return "cyclic-combination";
    case Kind::RangeClosureFailure:
      return "range-closure-failure(" + variable + ", " + parent + ")";
    case Kind::NotLeastUpperBound:
      return "not-least-upper-bound(" + model_id + ", " + variable + ")";
    case Kind::BudgetExceeded:
      return "budget-exceeded";
  }
  return "unknown";
}

CombineOutcome combine_prime(const CausalModel& m1, const CausalModel& m2) {
  try {
    std::set<std::string> names;
    for (const std::string& v : m1.variable_names()) names.insert(v);
    for (const std::string& v : m2.variable_names()) names.insert(v);

    std::vector<VariableDecl> decls;
    std::map<std::string, std::string> provenance;
    for (const std::string& v : names) {
      int s1 = m1.index_of(v);
      int s2 = m2.index_of(v);
      const CausalModel* src = nullptr;
      int slot = -1;
      if (s2 < 0) {
        src = &m1;
        slot = s1;
      } else if (s1 < 0) {
        src = &m2;
        slot = s2;
      } else if (can_explain(m1, m2, v)) {
        // Checking this direction first makes the first operand win when
        // both directions hold; the choice is semantically irrelevant then.
        src = &m1;
        slot = s1;
      } else if (can_explain(m2, m1, v)) {
        src = &m2;
        slot = s2;
      } else {
        return CombineError{CombineError::Kind::Incompatible, v, "", ""};
      }
      decls.push_back(decl_from(*src, slot));
      provenance[v] = src->id();
    }

    CausalModel combined(m1.id() + "_oplus_" + m2.id(), std::move(decls));
    for (const Diagnostic& d : combined.validate()) {
      if (d.rule == "cyclic-parent-graph")
        return CombineError{CombineError::Kind::CyclicCombination, "", "", ""};
      if (d.rule == "closure-failure") {
        // The carried equation broke, which can only happen when a variable
        // it mentions got a wider range from the other model.
        const CausalModel& src = provenance.at(d.variable) == m1.id() ? m1 : m2;
        std::string culprit;
        int cs = combined.index_of(d.variable);
        for (const std::string& mname : mentioned_variables(*combined.equation(cs))) {
          int in_src = src.index_of(mname);
          int in_comb = combined.index_of(mname);
          if (in_src < 0 || !(src.range(in_src) == combined.range(in_comb))) {
            culprit = mname;
            break;
          }
        }
        return CombineError{CombineError::Kind::RangeClosureFailure, d.variable, "", culprit};
      }
      // Anything else means an input violated its own invariants.
      throw std::invalid_argument("combine on invalid input: " + d.to_string());
    }
    return CombinedModel{std::move(combined), std::move(provenance)};
  } catch (const BudgetExceeded&) {
    return CombineError{CombineError::Kind::BudgetExceeded, "", "", ""};
  }
}

CombineOutcome combine(const CausalModel& m1, const CausalModel& m2) {
  CombineOutcome out = combine_prime(m1, m2);
  if (std::holds_alternative<CombineError>(out)) return out;
  const CombinedModel& cm = std::get<CombinedModel>(out);
  try {
    for (const CausalModel* in : {&m1, &m2}) {
      for (const std::string& v : in->variable_names()) {
        if (!can_explain(cm.model, *in, v))
          return CombineError{CombineError::Kind::NotLeastUpperBound, v, in->id(), ""};
      }
    }
  } catch (const BudgetExceeded&) {
    return CombineError{CombineError::Kind::BudgetExceeded, "", "", ""};
  }
  return out;
}

bool union_acyclicity_precheck(const CausalModel& m1, const CausalModel& m2) {
  std::set<std::string> name_set;
  for (const std::string& v : m1.variable_names()) name_set.insert(v);
  for (const std::string& v : m2.variable_names()) name_set.insert(v);

  Digraph g;
  g.nodes.assign(name_set.begin(), name_set.end());
  g.out.resize(g.nodes.size());
  auto idx = [&](const std::string& n) {
    return int(std::lower_bound(g.nodes.begin(), g.nodes.end(), n) - g.nodes.begin());
  };
  for (const CausalModel* m : {&m1, &m2})
    for (const auto& [from, to] : m->parent_graph().edge_names())
      g.out[size_t(idx(from))].push_back(idx(to));
  for (auto& row : g.out) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return is_acyclic(g);
}

// ============================================================
// Multi-model combination
// ============================================================

namespace {

// Shared state for the inductive mutual-compatibility recursion: fold
// results and verdicts per index mask, so overlapping subsets are combined
// once.
struct MaskSearch {
  const std::vector<const CausalModel*>& models;
  std::map<uint64_t, std::optional<CombinedModel>> folds;
  std::map<uint64_t, CombineError> fold_errors;
  std::map<uint64_t, bool> verdicts;
  std::optional<CombineError> cause;

  explicit MaskSearch(const std::vector<const CausalModel*>& m) : models(m) {}

  // Left fold in index order over the mask's members.
  const CombinedModel* fold(uint64_t mask) {
    auto it = folds.find(mask);
    if (it != folds.end()) return it->second ? &*it->second : nullptr;
    std::optional<CombinedModel> result;
    int high = 63 - std::countl_zero(mask);
    uint64_t rest = mask & ~(uint64_t(1) << high);
    if (rest == 0) {
      result = trivial_combined(*models[size_t(high)]);
    } else if (const CombinedModel* prefix = fold(rest)) {
      CombineOutcome out = combine(prefix->model, *models[size_t(high)]);
      if (auto* err = std::get_if<CombineError>(&out)) {
        fold_errors[mask] = *err;
      } else {
        CombinedModel cm = std::get<CombinedModel>(std::move(out));
        // Rewrite fold-intermediate provenance back to original model ids.
        for (auto& [var, src] : cm.provenance)
          if (src == prefix->model.id()) src = prefix->provenance.at(var);
        result = std::move(cm);
      }
    } else {
      fold_errors[mask] = fold_errors.at(rest);
    }
    auto [pos, _] = folds.emplace(mask, std::move(result));
    return pos->second ? &*pos->second : nullptr;
  }

  bool check(uint64_t mask) {
    auto it = verdicts.find(mask);
    if (it != verdicts.end()) return it->second;
    bool ok = compute(mask);
    verdicts[mask] = ok;
    return ok;
  }

  bool compute(uint64_t mask) {
    int k = std::popcount(mask);
    if (k <= 1) return true;
    std::vector<int> members;
    for (int i = 0; i < 64; ++i)
      if (mask & (uint64_t(1) << i)) members.push_back(i);
    if (k == 2) {
      const CausalModel& a = *models[size_t(members[0])];
      const CausalModel& b = *models[size_t(members[1])];
      if (compatible(a, b)) return true;
      if (!cause)
        cause = CombineError{CombineError::Kind::Incompatible, first_incompatible_var(a, b), "",
                             ""};
      return false;
    }
    for (int i : members)
      if (!check(mask & ~(uint64_t(1) << i))) return false;
    for (int i : members) {
      uint64_t rest = mask & ~(uint64_t(1) << i);
      const CombinedModel* cm = fold(rest);
      if (!cm) {
        if (!cause) cause = fold_errors.at(rest);
        return false;
      }
      if (!compatible(*models[size_t(i)], cm->model)) {
        if (!cause)
          cause = CombineError{CombineError::Kind::Incompatible,
                               first_incompatible_var(*models[size_t(i)], cm->model), "", ""};
        return false;
      }
    }
    return true;
  }
};

}  // namespace

bool mutually_compatible(const std::vector<const CausalModel*>& models, CombineError* cause) {
  if (models.size() > 63)
    throw std::invalid_argument("mutual compatibility check capped at 63 models");
  if (models.size() <= 1) return true;
  MaskSearch search(models);
  uint64_t all = (uint64_t(1) << models.size()) - 1;
  bool ok = search.check(all);
  if (!ok && cause && search.cause) *cause = *search.cause;
  return ok;
}

CombineOutcome combine_all(const std::vector<CausalModel>& models) {
  if (models.empty()) throw std::invalid_argument("combine_all needs at least one model");
  std::vector<const CausalModel*> ptrs;
  for (const CausalModel& m : models) ptrs.push_back(&m);

  CombineError cause;
  if (!mutually_compatible(ptrs, &cause)) return cause;
  if (models.size() == 1) return trivial_combined(models[0]);

  MaskSearch search(ptrs);
  uint64_t all = (uint64_t(1) << models.size()) - 1;
  const CombinedModel* forward = search.fold(all);
  if (!forward) return search.fold_errors.at(all);

  // The fold order must not matter; folding the reversed list cross-checks
  // that instead of assuming it.
  std::vector<const CausalModel*> rev(ptrs.rbegin(), ptrs.rend());
  MaskSearch rev_search(rev);
  const CombinedModel* backward = rev_search.fold(all);
  if (!backward || !semantically_equal(forward->model, backward->model))
    throw std::logic_error("combination result depends on the fold order");
  return *forward;
}

}  // namespace cfuse
