#pragma once

#include <string>
#include <vector>

#include "cfuse/model.hpp"

namespace cfuse {

// Certificate for a positive can_explain answer. For every value the
// explained model realizes for the target under some intervention on its
// focus set, `entries` stores one context of the explaining model that
// reproduces it under the same intervention.
struct ExplanationWitness {
  std::string target;
  std::vector<std::string> intervened;  // focus of the explained model, sorted

  struct Entry {
    std::vector<Value> intervention;  // parallel to `intervened`
    Value observed;
    Context context;                  // context of the explaining model
  };
  std::vector<Entry> entries;
};

// Replays every entry through satisfies() on the explaining model.
bool witness_replays(const CausalModel& explainer, const ExplanationWitness& w);

// Whether m1 can explain m2 with respect to `var`: equal target ranges,
// m2's focus of the target contained in m1's, and every (intervention on
// m2's focus, realized target value) pair of m2 reproducible in m1 under
// some context. Throws std::invalid_argument when `var` is missing from
// either model. When `witness` is non-null and the answer is true, it is
// filled with the lexicographically least explaining context per entry.
bool can_explain(const CausalModel& m1, const CausalModel& m2, const std::string& var,
                 ExplanationWitness* witness = nullptr);

// Interchangeability at `var`: same exogeneity, range and focus, and (when
// endogenous) the same parents with extensionally equal equations.
bool c_equivalent(const CausalModel& m1, const CausalModel& m2, const std::string& var);

// can_explain in at least one direction.
bool c_compatible(const CausalModel& m1, const CausalModel& m2, const std::string& var);

// c_compatible at every variable the models share. Vacuously true for
// disjoint variable sets.
bool compatible(const CausalModel& m1, const CausalModel& m2);

// m1 can explain m2 at every variable of m2. False (not an error) when m2
// has a variable m1 lacks.
bool dominates(const CausalModel& m1, const CausalModel& m2);

}  // namespace cfuse
