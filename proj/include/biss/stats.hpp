#pragma once

#include <span>

namespace biss {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;    // sample standard deviation
  double ci95_half = 0.0; // normal approximation: 1.96 * sd / sqrt(n)
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> values);

/// Paired one-sided Wilcoxon signed-rank test of "x tends to exceed y".
/// Zero differences are dropped; ties get average ranks and the variance is
/// tie-corrected. p-values use the normal approximation with continuity
/// correction.
struct WilcoxonResult {
  std::size_t n_nonzero = 0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  /// Matched-pairs rank-biserial correlation (w_plus - w_minus) / total rank sum.
  double rank_biserial = 0.0;
};

WilcoxonResult wilcoxon_greater(std::span<const double> x, std::span<const double> y);

}  // namespace biss
