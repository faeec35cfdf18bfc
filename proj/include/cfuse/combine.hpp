#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cfuse/model.hpp"

namespace cfuse {

// Result of a combination, with per-variable provenance: which input model
// supplied the variable's range, equation and focus set.
struct CombinedModel {
  CausalModel model;
  std::map<std::string, std::string> provenance;  // variable -> source model id
};

struct CombineError {
  enum class Kind : uint8_t {
    Incompatible,         // a shared variable fails can-explain in both directions
    CyclicCombination,    // the combined parent graph has a cycle
    RangeClosureFailure,  // a carried equation broke over a drifted parent range
    NotLeastUpperBound,   // the combination fails to dominate one input
    BudgetExceeded,
  };

  Kind kind = Kind::Incompatible;
  std::string variable;  // witness variable, when the kind names one
  std::string model_id;  // NotLeastUpperBound: the input left unexplained
  std::string parent;    // RangeClosureFailure: the parent whose range drifted

  std::string to_string() const;
};

using CombineOutcome = std::variant<CombinedModel, CombineError>;

// The raw union combination: variables are the union of the two signatures;
// an unshared variable copies its home model, a shared one copies whichever
// side can explain the other there (the first operand when both can). The
// result is re-validated; a cycle or a broken equation closure is an error.
CombineOutcome combine_prime(const CausalModel& m1, const CausalModel& m2);

// combine_prime plus the least-upper-bound requirement: the result must
// dominate both inputs, otherwise NotLeastUpperBound names the first input
// variable that the combination cannot explain.
CombineOutcome combine(const CausalModel& m1, const CausalModel& m2);

// True when the union of the two parent graphs is acyclic. Sufficient but
// not necessary for combine_prime to be acyclic, and linear in the edges,
// so callers can skip doomed combinations cheaply.
bool union_acyclicity_precheck(const CausalModel& m1, const CausalModel& m2);

// Left fold of combine over the list. Requires the whole list to be
// mutually compatible and re-checks order independence by folding in
// reverse; an order-dependent result throws std::logic_error.
CombineOutcome combine_all(const std::vector<CausalModel>& models);

// The inductive notion used for multi-model combination: singletons always,
// pairs when compatible, larger sets when every (n-1)-subset is mutually
// compatible and each member is compatible with the combination of the
// others. When a required intermediate combination is undefined the set
// counts as not mutually compatible and `cause` (if given) says why.
bool mutually_compatible(const std::vector<const CausalModel*>& models,
                         CombineError* cause = nullptr);

}  // namespace cfuse
