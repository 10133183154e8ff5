#pragma once

#include <vector>

#include "biss/sampler.hpp"

namespace biss {

/// How per-metric variances are combined into one removal priority.
enum class VarianceAggregate { min, mean };

/// Per-test removal priority for the greedy baseline: the variance of the
/// test's column across variants, divided by the mean column variance of its
/// metric, then combined across metrics. Lower means removed earlier.
std::vector<double> variance_priority(const RtsmInstance& instance,
                                      VarianceAggregate aggregate = VarianceAggregate::min);

/// Absolute loadings of `tests` on the first principal direction of the
/// standardized, column-centred performance data (metrics stacked as extra
/// rows). Returns an empty vector when the data has no variance at all.
std::vector<double> principal_loadings(const RtsmInstance& instance, const TestSubset& tests);

/// Repeatedly removes one uniformly chosen test, keeping the removal when the
/// rest stays feasible, until no single removal works.
class RandomSampler final : public Sampler {
public:
  std::string name() const override { return "random"; }
  SampleOutcome sample(const TestSubset& removable, const TestSubset& necessary,
                       FeasibilityOracle& oracle, Rng& rng,
                       const SearchBudget& budget) const override;
};

/// One pass over the removable tests in ascending variance priority.
class GreedySampler final : public Sampler {
public:
  explicit GreedySampler(VarianceAggregate aggregate = VarianceAggregate::min)
      : aggregate_(aggregate) {}
  std::string name() const override { return "greedy"; }
  bool deterministic() const override { return true; }
  SampleOutcome sample(const TestSubset& removable, const TestSubset& necessary,
                       FeasibilityOracle& oracle, Rng& rng,
                       const SearchBudget& budget) const override;

private:
  VarianceAggregate aggregate_;
};

/// Removes the smallest-loading test on the first principal direction,
/// recomputing the direction after every successful removal.
class PcaSampler final : public Sampler {
public:
  std::string name() const override { return "pca"; }
  bool deterministic() const override { return true; }
  SampleOutcome sample(const TestSubset& removable, const TestSubset& necessary,
                       FeasibilityOracle& oracle, Rng& rng,
                       const SearchBudget& budget) const override;
};

/// Shrinks `current` (feasible over all tests) by random single removals.
Solution random_search_step(const TestSubset& current, const RtsmInstance& instance, Rng& rng,
                            const SearchBudget& budget, const OracleOptions& options = {});

Solution greedy_minimize(const RtsmInstance& instance, const SearchBudget& budget,
                         VarianceAggregate aggregate = VarianceAggregate::min,
                         const OracleOptions& options = {});

Solution pca_minimize(const RtsmInstance& instance, const SearchBudget& budget,
                      const OracleOptions& options = {});

}  // namespace biss
