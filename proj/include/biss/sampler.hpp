#pragma once

#include <memory>
#include <string>

#include "biss/rng.hpp"
#include "biss/solution.hpp"

namespace biss {

struct SampleOutcome {
  TestSubset tests;
  bool truncated = false;  // the budget ran out before the search finished
};

/// Strategy that shrinks a feasible working set inside one oracle context.
///
/// Callers guarantee `necessary ∪ removable` is feasible for `oracle`; the
/// returned set is feasible as well, and never larger than that union.
class Sampler {
public:
  virtual ~Sampler() = default;
  virtual std::string name() const = 0;
  /// True if the outcome does not depend on the rng stream.
  virtual bool deterministic() const { return false; }
  virtual SampleOutcome sample(const TestSubset& removable, const TestSubset& necessary,
                               FeasibilityOracle& oracle, Rng& rng,
                               const SearchBudget& budget) const = 0;
};

enum class SamplerKind { biss, random, greedy, pca };

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(const std::string& name);  // throws on unknown names

}  // namespace biss
