#pragma once

#include "biss/sampler.hpp"

namespace biss {

/// Working set split into tests whose removal breaks feasibility and the rest.
struct Partition {
  TestSubset necessary;
  TestSubset removable;
  bool partial = false;  // the budget expired before every test was checked
};

/// Moves every test of `removable` whose single removal from the working set
/// `necessary ∪ removable` makes it infeasible into `necessary`. Tests are
/// checked in canonical order.
Partition find_necessary(TestSubset removable, TestSubset necessary, FeasibilityOracle& oracle,
                         const SearchBudget& budget);

/// Random split with |first| = floor(|set| / 2). Both halves are sorted.
std::pair<TestSubset, TestSubset> split_half(const TestSubset& set, Rng& rng);

/// Bisection sampling: classify necessary tests, then halve the removable
/// pool while a half still yields a feasible set. When neither half works,
/// both halves are tried as the forced-necessary one and the cheaper result
/// is kept.
class BisectionSampler final : public Sampler {
public:
  /// Recursion deeper than floor(log2 |removable|) + `extra_depth` returns the
  /// working set unchanged.
  explicit BisectionSampler(std::size_t extra_depth = 8) : extra_depth_(extra_depth) {}

  std::string name() const override { return "biss"; }
  SampleOutcome sample(const TestSubset& removable, const TestSubset& necessary,
                       FeasibilityOracle& oracle, Rng& rng,
                       const SearchBudget& budget) const override;

private:
  std::size_t extra_depth_;
};

/// Runs bisection sampling once for `context` and validates the result.
Solution bisection_sample(const TestSubset& removable, const TestSubset& necessary,
                          const TestSubset& context, const RtsmInstance& instance,
                          const SearchBudget& budget, const OracleOptions& options = {});

}  // namespace biss
