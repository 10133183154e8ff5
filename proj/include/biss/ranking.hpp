#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "biss/matrix.hpp"

namespace biss {

/// Total order over variants. Rank 1 is the largest total; equal totals are
/// ordered by ascending variant index, so every ranking is a permutation.
class Ranking {
public:
  static Ranking from_totals(std::vector<double> totals);

  std::size_t size() const { return totals_.size(); }
  /// 1-based rank of `variant`.
  std::size_t rank(std::size_t variant) const { return rank_[variant]; }
  const std::vector<std::size_t>& ranks() const { return rank_; }
  /// Variants from best to worst.
  const std::vector<std::size_t>& order() const { return order_; }
  const std::vector<double>& totals() const { return totals_; }

  friend bool operator==(const Ranking& a, const Ranking& b) { return a.rank_ == b.rank_; }

private:
  std::vector<double> totals_;
  std::vector<std::size_t> rank_;
  std::vector<std::size_t> order_;
};

/// Row sums over `tests`, accumulated left to right in canonical test order.
std::vector<double> subset_totals(const PerformanceMatrix& matrix, const TestSubset& tests);

Ranking full_ranking(const PerformanceMatrix& matrix);

/// Ranking by sum_t weights[k] * values(i, tests[k]); `weights` is aligned with `tests`.
Ranking weighted_ranking(const PerformanceMatrix& matrix, const TestSubset& tests,
                         std::span<const double> weights);

/// Id-keyed form. Throws on ids that are not columns of `matrix` or lack a weight.
Ranking weighted_ranking(const PerformanceMatrix& matrix, const std::vector<std::string>& selected,
                         const std::map<std::string, double>& weights);

/// Pair counts behind a Kendall tau value. Rankings are total orders, so
/// concordant + discordant == pairs.
struct KendallCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t pairs = 0;

  double tau() const;
  /// Exact test of (concordant - discordant) / pairs >= target, with no
  /// floating-point division involved.
  bool meets(double target) const;
};

/// Reference O(n^2) pair enumeration.
KendallCounts kendall_counts_pairwise(const Ranking& a, const Ranking& b);
/// O(n log n) inversion count; agrees exactly with the pairwise reference.
KendallCounts kendall_counts(const Ranking& a, const Ranking& b);

double kendall_tau(const Ranking& a, const Ranking& b);

/// Joint cost/accuracy score: (2 * cost_reduction + 1 + tau) / 4, in [0, 1].
/// Keeping every test at tau = 1 scores 0.5.
double score(double cost_reduction, double tau);

/// 1 - cost(kept) / cost(all tests).
double cost_reduction(const RtsmInstance& instance, const TestSubset& kept);

}  // namespace biss
