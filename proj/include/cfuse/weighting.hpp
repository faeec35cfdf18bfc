#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfuse/combine.hpp"
#include "cfuse/model.hpp"

namespace cfuse {

struct ExpertInput {
  CausalModel model;
  double prior = 1.0;  // confidence in (0, 1]
};

// Expert index sets, 1-based and ascending, matching the usual numbering of
// a panel.
using IndexSet = std::vector<int>;

// Which subsets of the panel fit together, with the combined model and the
// combination complexity where the combination goes through. Folds of three
// or more models can fail (for example on a cycle) even when the set is
// mutually compatible; such sets then lack entries in `combined` and
// `complexity`.
struct CompatReport {
  std::vector<IndexSet> compat;                // ordered by size, then lexicographic
  std::map<IndexSet, CombinedModel> combined;
  std::map<IndexSet, uint64_t> complexity;     // singletons are 1 by definition
  // Standalone per-variable explanation complexities incurred across the
  // combination, in fold order; the threshold rule caps these too.
  std::map<IndexSet, std::vector<uint64_t>> single_complexities;
};

struct ScoreTable {
  std::string rule;
  std::map<IndexSet, double> scores;
  double normalization = 0.0;  // the mass sum the scores were divided by
};

struct DegenerateNormalization : std::runtime_error {
  DegenerateNormalization()
      : std::runtime_error("every candidate mass is zero; nothing to normalize") {}
};

struct ContractViolation : std::runtime_error {
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// All nonempty mutually compatible index sets over the panel, with combined
// models and complexities. Exponential in the panel size, hence the cap.
CompatReport enumerate_compat(const std::vector<ExpertInput>& inputs, size_t max_models = 10);

// Eq.-style scoring: each compatible set I gets mass prod_{i in I} p_i *
// prod_{j not in I} (1 - p_j), normalized over the report's compat family.
ScoreTable score_plain(const CompatReport& report, const std::vector<double>& priors);

// Plain masses, but zeroed wherever the combination complexity or any
// single explanation complexity exceeds the cap.
ScoreTable score_threshold(const CompatReport& report, const std::vector<double>& priors,
                           uint64_t cap);

// Plain masses damped by 1/mu (mu floored at 1 so vacuous combinations with
// mu = 0 are not boosted).
ScoreTable score_inverse(const CompatReport& report, const std::vector<double>& priors);

// Plain masses damped by e^{-mu} for combined sets; singletons keep their
// plain mass.
ScoreTable score_exponential(const CompatReport& report, const std::vector<double>& priors);

// Caller-supplied f(Q, mu), required non-decreasing in Q and non-increasing
// in mu; the contract is sampled and violations throw ContractViolation.
ScoreTable score_custom(const CompatReport& report, const std::vector<double>& priors,
                        const std::function<double(double, double)>& f);

}  // namespace cfuse
