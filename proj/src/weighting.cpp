#include "cfuse/weighting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <sstream>

#include "cfuse/complexity.hpp"
#include "cfuse/explain.hpp"

namespace cfuse {

namespace {

IndexSet mask_to_set(uint64_t mask) {
  IndexSet out;
  for (int i = 0; i < 64; ++i)
    if (mask & (uint64_t(1) << i)) out.push_back(i + 1);
  return out;
}

CombinedModel singleton_combined(const CausalModel& m) {
  CombinedModel cm{m, {}};
  for (const std::string& v : m.variable_names()) cm.provenance[v] = m.id();
  return cm;
}

void check_priors(const std::vector<double>& priors) {
  for (double p : priors)
    if (!(p > 0.0) || p > 1.0)
      throw std::invalid_argument("priors must lie in (0, 1]");
}

// Unnormalized mass of Eq.-(1) shape: members contribute their prior,
// non-members their complement.
double subset_mass(const IndexSet& set, const std::vector<double>& priors) {
  double q = 1.0;
  size_t k = 0;
  for (size_t j = 0; j < priors.size(); ++j) {
    bool in = k < set.size() && set[k] == int(j) + 1;
    if (in) ++k;
    q *= in ? priors[j] : 1.0 - priors[j];
  }
  return q;
}

template <typename MassFn>
ScoreTable build_scores(const std::string& rule, const CompatReport& report,
                        const std::vector<double>& priors, MassFn mass_of) {
  check_priors(priors);
  for (const IndexSet& I : report.compat)
    if (!I.empty() && size_t(I.back()) > priors.size())
      throw std::invalid_argument("compat family references a prior that was not supplied");

  std::map<IndexSet, double> masses;
  double n = 0.0;
  for (const IndexSet& I : report.compat) {
    double m = mass_of(I, subset_mass(I, priors));
    masses[I] = m;
    n += m;
  }
  if (!(n > 0.0)) throw DegenerateNormalization();
  ScoreTable t;
  t.rule = rule;
  t.normalization = n;
  for (auto& [I, m] : masses) t.scores[I] = m / n;
  return t;
}

uint64_t complexity_of(const CompatReport& report, const IndexSet& I) {
  auto it = report.complexity.find(I);
  if (it == report.complexity.end())
    throw std::invalid_argument("combination complexity unavailable for a compatible set");
  return it->second;
}

}  // namespace

// ============================================================
// Compat enumeration
// ============================================================

CompatReport enumerate_compat(const std::vector<ExpertInput>& inputs, size_t max_models) {
  if (inputs.size() > max_models)
    throw std::invalid_argument("panel larger than the configured maximum");
  for (const ExpertInput& in : inputs)
    if (!(in.prior > 0.0) || in.prior > 1.0)
      throw std::invalid_argument("priors must lie in (0, 1]");

  size_t n = inputs.size();
  struct MaskInfo {
    bool compat = false;
    std::optional<CombinedModel> fold;
    std::optional<uint64_t> steps;  // pooled contexts over the fold; 0 for singletons
    std::vector<uint64_t> singles;
  };
  std::vector<MaskInfo> info(size_t(1) << n);

  // Every dependency of a mask is a strict submask, hence numerically
  // smaller, so plain ascending order works.
  for (uint64_t mask = 1; mask < (uint64_t(1) << n); ++mask) {
    MaskInfo& mi = info[mask];
    int k = std::popcount(mask);
    if (k == 1) {
      mi.compat = true;
      mi.fold = singleton_combined(inputs[size_t(std::countr_zero(mask))].model);
      mi.steps = 0;
      continue;
    }

    std::vector<int> members;
    for (int i = 0; i < int(n); ++i)
      if (mask & (uint64_t(1) << i)) members.push_back(i);

    // Left fold in index order: extend the fold of the mask minus its top
    // index, tracking the pooled complexity and the standalone explanation
    // complexities of each step.
    int top = members.back();
    uint64_t prefix = mask & ~(uint64_t(1) << top);
    const CausalModel& next = inputs[size_t(top)].model;
    if (info[prefix].fold) {
      const CombinedModel& acc = *info[prefix].fold;
      auto cc = combination_complexity(acc.model, next);
      if (cc && info[prefix].steps) {
        mi.steps = *info[prefix].steps + cc->cardinality;
        mi.singles = info[prefix].singles;
        for (const auto& [var, explainer_id] : cc->direction) {
          const CausalModel& e = (explainer_id == acc.model.id()) ? acc.model : next;
          const CausalModel& x = (explainer_id == acc.model.id()) ? next : acc.model;
          if (auto ec = explanation_complexity(e, x, var))
            mi.singles.push_back(ec->cardinality);
        }
      }
      CombineOutcome out = combine(acc.model, next);
      if (auto* cm = std::get_if<CombinedModel>(&out)) {
        for (auto& [var, src] : cm->provenance)
          if (src == acc.model.id()) src = acc.provenance.at(var);
        mi.fold = std::move(*cm);
      }
    }

    if (k == 2) {
      mi.compat = compatible(inputs[size_t(members[0])].model, inputs[size_t(members[1])].model);
      continue;
    }
    bool ok = true;
    for (int i : members)
      if (!info[mask & ~(uint64_t(1) << i)].compat) {
        ok = false;
        break;
      }
    if (ok) {
      for (int i : members) {
        uint64_t rest = mask & ~(uint64_t(1) << i);
        if (!info[rest].fold ||
            !compatible(inputs[size_t(i)].model, info[rest].fold->model)) {
          ok = false;
          break;
        }
      }
    }
    mi.compat = ok;
  }

  CompatReport report;
  for (uint64_t mask = 1; mask < (uint64_t(1) << n); ++mask)
    if (info[mask].compat) report.compat.push_back(mask_to_set(mask));
  std::sort(report.compat.begin(), report.compat.end(),
            [](const IndexSet& a, const IndexSet& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  for (const IndexSet& I : report.compat) {
    uint64_t mask = 0;
    for (int i : I) mask |= uint64_t(1) << (i - 1);
    const MaskInfo& mi = info[mask];
    if (mi.fold) report.combined.emplace(I, *mi.fold);
    if (I.size() == 1)
      report.complexity[I] = 1;
    else if (mi.steps)
      report.complexity[I] = *mi.steps;
    if (!mi.singles.empty()) report.single_complexities[I] = mi.singles;
  }
  return report;
}

// ============================================================
// Scoring rules
// ============================================================

ScoreTable score_plain(const CompatReport& report, const std::vector<double>& priors) {
  return build_scores("plain", report, priors, [](const IndexSet&, double q) { return q; });
}

ScoreTable score_threshold(const CompatReport& report, const std::vector<double>& priors,
                           uint64_t cap) {
  return build_scores("threshold", report, priors, [&](const IndexSet& I, double q) {
    if (complexity_of(report, I) > cap) return 0.0;
    auto it = report.single_complexities.find(I);
    if (it != report.single_complexities.end())
      for (uint64_t s : it->second)
        if (s > cap) return 0.0;
    return q;
  });
}

ScoreTable score_inverse(const CompatReport& report, const std::vector<double>& priors) {
  return build_scores("inverse", report, priors, [&](const IndexSet& I, double q) {
    return q / double(std::max<uint64_t>(1, complexity_of(report, I)));
  });
}

ScoreTable score_exponential(const CompatReport& report, const std::vector<double>& priors) {
  return build_scores("exponential", report, priors, [&](const IndexSet& I, double q) {
    if (I.size() == 1) return q;
    return q * std::exp(-double(complexity_of(report, I)));
  });
}

ScoreTable score_custom(const CompatReport& report, const std::vector<double>& priors,
                        const std::function<double(double, double)>& f) {
  // Sampled contract check: nonnegative, non-decreasing in Q, non-increasing
  // in mu. The grid covers the unit interval and small complexities, which
  // is where every actual score lives.
  const double eps = 1e-12;
  for (int mu = 0; mu <= 12; ++mu) {
    for (int qi = 0; qi <= 20; ++qi) {
      double q = qi / 20.0;
      double here = f(q, double(mu));
      if (here < 0.0) {
        std::ostringstream msg;
        msg << "f(" << q << ", " << mu << ") = " << here << " is negative";
        throw ContractViolation(msg.str());
      }
      if (qi > 0 && here + eps < f((qi - 1) / 20.0, double(mu))) {
        std::ostringstream msg;
        msg << "f decreases in Q at (" << q << ", " << mu << ")";
        throw ContractViolation(msg.str());
      }
      if (mu > 0 && here > f(q, double(mu - 1)) + eps) {
        std::ostringstream msg;
        msg << "f increases in mu at (" << q << ", " << mu << ")";
        throw ContractViolation(msg.str());
      }
    }
  }
  return build_scores("custom", report, priors, [&](const IndexSet& I, double q) {
    return f(q, double(complexity_of(report, I)));
  });
}

}  // namespace cfuse
