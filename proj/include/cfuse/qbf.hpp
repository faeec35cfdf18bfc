#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfuse/expr.hpp"
#include "cfuse/model.hpp"

namespace cfuse {

// Closed forall/exists quantified boolean formula: for every assignment of
// the universal variables there must be an assignment of the existential
// ones making the matrix true.
struct CQBF {
  std::vector<std::string> universal;
  std::vector<std::string> existential;
  Expr matrix;
};

struct Reduction {
  CausalModel m1;  // carries the matrix, focused on every variable
  CausalModel m2;  // universal variables only, target pinned to true
  std::string target;
};

// Builds a model pair whose can-explain verdict at `target` equals the
// truth of q. Variables absent from the matrix are padded in with
// tautological conjuncts; the target name is suffixed until fresh.
Reduction reduce_cqbf(const CQBF& q);

// Exhaustive forall/exists evaluation. Throws std::invalid_argument above
// `max_vars` total variables.
bool qbf_brute_force(const CQBF& q, size_t max_vars = 20);

// The generic exponential decision procedure for can-explain: full context
// spaces on both sides, no relevance pruning, with counters reporting the
// work. Same verdict as can_explain, useful for cross-checks and for
// benchmarking the quantifier structure directly.
struct DecisionStats {
  bool verdict = false;
  uint64_t interventions_examined = 0;
  uint64_t contexts_examined = 0;
};

DecisionStats decide_can_explain(const CausalModel& m1, const CausalModel& m2,
                                 const std::string& var);

}  // namespace cfuse
