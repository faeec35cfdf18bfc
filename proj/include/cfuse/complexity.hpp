#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfuse/model.hpp"

namespace cfuse {

// One obligation behind a can-explain check: the explained model realizes
// `value` for `target` under `intervention` in some context, so the
// explainer must reproduce that pair.
struct Requirement {
  std::string explainer;  // model id
  std::string explained;  // model id
  std::string target;
  std::vector<std::pair<std::string, Value>> intervention;
  Value value;
};

// A minimum context set carrying all requirements, with the contexts that
// realize it and (for combination complexity) the per-variable choice of
// explaining model.
struct ComplexityResult {
  uint64_t cardinality = 0;
  std::vector<std::pair<std::string, Context>> witness;  // (model id, context)
  std::map<std::string, std::string> direction;          // variable -> explainer model id
};

// Every realized (intervention over m2's focus of var, value) pair of m2,
// in deterministic enumeration order. These are the elements that any
// explaining context set of m1 must cover.
std::vector<Requirement> explanation_requirements(const CausalModel& m1, const CausalModel& m2,
                                                  const std::string& var);

// Minimum number of m1-contexts covering all requirements of m1 explaining
// m2 at var; nullopt exactly when can_explain is false.
std::optional<ComplexityResult> explanation_complexity(const CausalModel& m1,
                                                       const CausalModel& m2,
                                                       const std::string& var);

// Minimum total size of a pair of context sets (one per model) such that
// every shared variable is fully explained by one side using only that
// side's set; minimized jointly over the per-variable direction choices.
// Contexts pool across variables explained by the same side. nullopt when
// some shared variable is explainable in neither direction.
std::optional<ComplexityResult> combination_complexity(const CausalModel& m1,
                                                       const CausalModel& m2);

// Exact minimum set cover over elements 0..element_count-1, sets given as
// sorted index lists. Returns the lexicographically least of the
// minimum-cardinality covers as ascending set indices, or nullopt when no
// cover exists. Exact search, never the greedy approximation.
std::optional<std::vector<int>> min_set_cover(size_t element_count,
                                              const std::vector<std::vector<int>>& sets);
std::optional<std::vector<int>> min_set_cover(size_t element_count,
                                              const std::vector<std::vector<int>>& sets,
                                              Budget& budget);

}  // namespace cfuse
