#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "biss/matrix.hpp"
#include "biss/ranking.hpp"

namespace biss {

struct OracleOptions {
  /// Tikhonov parameter added to the least-squares fit. Zero disables it.
  double ridge = 0.0;
  /// Replace negative fitted weights with zero after the fit.
  bool clamp_negative = false;
};

struct WeightFit {
  std::vector<double> weights;  // aligned with the fitted subset
  double residual = 0.0;        // sum of squared prediction errors
};

/// Least-squares weights predicting each variant's total over `context` from
/// the columns in `subset`. The minimum-norm minimizer is returned when the
/// design matrix is rank deficient. When `subset == context` the unit weights
/// are an exact minimizer and are returned as-is.
WeightFit fit_weights(const PerformanceMatrix& matrix, const TestSubset& subset,
                      const TestSubset& context, const OracleOptions& options = {});
WeightFit fit_weights(const PerformanceMatrix& matrix, const TestSubset& subset,
                      const OracleOptions& options = {});

struct OracleResult {
  bool feasible = false;
  std::vector<double> per_metric_tau;
  std::vector<KendallCounts> per_metric_counts;
  std::vector<std::vector<double>> weights;  // per metric, aligned with the subset
  std::vector<double> fit_residual;

  double worst_tau() const;
};

/// The `solves` predicate for one context (the set of tests whose summed
/// performance defines the reference ranking). Reference totals and rankings
/// are computed once at construction.
///
/// `feasible()` memoizes verdicts by exact subset, so an oracle object must not
/// be shared between threads; create one per search.
class FeasibilityOracle {
public:
  FeasibilityOracle(const RtsmInstance& instance, TestSubset context, OracleOptions options = {});

  const RtsmInstance& instance() const { return *instance_; }
  const TestSubset& context() const { return context_; }
  const OracleOptions& options() const { return options_; }
  const Ranking& reference(std::size_t metric) const { return reference_[metric]; }

  /// Full evaluation. Throws on an empty subset or one that leaves the context.
  OracleResult evaluate(const TestSubset& subset) const;

  /// Cached verdict. An empty subset is never feasible.
  bool feasible(const TestSubset& subset);

  std::size_t evaluations() const { return evaluations_; }
  std::size_t cache_hits() const { return cache_hits_; }

private:
  const RtsmInstance* instance_;
  TestSubset context_;
  OracleOptions options_;
  std::vector<Ranking> reference_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<TestSubset, bool>>> memo_;
  std::size_t memo_entries_ = 0;
  std::size_t evaluations_ = 0;
  std::size_t cache_hits_ = 0;
};

/// Checks `subset` against the reference ranking over all tests.
OracleResult solves(const RtsmInstance& instance, const TestSubset& subset,
                    const OracleOptions& options = {});

/// Checks `subset` against the reference ranking over `context` only.
OracleResult solves_in_context(const TestSubset& context, const TestSubset& subset,
                               const RtsmInstance& instance, const OracleOptions& options = {});

}  // namespace biss
