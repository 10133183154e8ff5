#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biss/exact.hpp"
#include "biss/meta_solver.hpp"
#include "biss/stats.hpp"

namespace biss {

/// Method names accepted by the harness and the CLI: the four samplers run
/// through divide and conquer with restarts, plus the standalone "exact".
bool is_known_method(const std::string& method);

struct MethodConfig {
  double deadline_seconds = 0.0;  // 0 disables the deadline
  std::optional<std::size_t> n_splits;
  std::size_t max_merge_retries = 3;
  std::size_t workers = 1;
  OracleOptions oracle;
  VarianceAggregate greedy_aggregate = VarianceAggregate::min;
  ExactOptions exact;
};

Solution run_method(const RtsmInstance& instance, const std::string& method, std::uint64_t seed,
                    const MethodConfig& config, ProgressLog* progress = nullptr);

struct EvalRecord {
  std::string benchmark_id;
  std::string method;
  std::uint64_t seed = 0;
  double variant_fraction = 1.0;
  double cost_reduction = 0.0;
  double tau_on_full = 0.0;
  double score = 0.0;
  double wall_seconds = 0.0;
  bool timed_out = false;
  std::size_t iterations = 0;
  std::size_t n_variants_used = 0;
  std::size_t n_selected = 0;
  bool skipped = false;
  std::string note;
};

struct StudyInstance {
  std::string id;
  RtsmInstance instance;
};

struct StudyConfig {
  std::vector<std::string> methods{"biss"};
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> fractions{1.0};
  MethodConfig method;
  /// Refit weights on the full variant set instead of reusing the weights
  /// fitted on the sampled variants.
  bool refit_on_full = false;
  /// Study cells run concurrently up to this many threads.
  std::size_t workers = 1;
};

/// Variants kept for one study cell: ceil(fraction * n) of them, uniformly
/// sampled from a stream derived from (seed, fraction), in ascending order.
std::vector<std::size_t> sample_variants(std::size_t n_variants, double fraction, std::uint64_t seed);

/// Worst-metric tau of `solution` (tests and weights) against the full
/// ranking of every metric of `instance`, computed from scratch.
double tau_on_instance(const RtsmInstance& instance, const TestSubset& tests,
                       const std::vector<std::vector<double>>& weights);

/// One record per (instance, method, seed, fraction), sorted by
/// (benchmark, method, fraction, seed). Fractions that leave fewer than two
/// variants produce a skipped record.
std::vector<EvalRecord> run_matrix_study(const std::vector<StudyInstance>& instances,
                                         const StudyConfig& config);

enum class GroupField { method, benchmark, fraction, seed };
GroupField parse_group_field(const std::string& name);
std::string group_key(const EvalRecord& record, GroupField field);

struct CdfPoint {
  std::string group;
  double score = 0.0;
  double cdf = 0.0;
};

/// Empirical CDF of scores per group, one point per distinct score. Skipped
/// records are ignored.
std::vector<CdfPoint> cumulative_score_distribution(const std::vector<EvalRecord>& records,
                                                    GroupField group_by);

struct RedundancyReport {
  std::size_t n_solutions = 0;
  double min_cost_ratio = 0.0;
  double median_cost_ratio = 0.0;
  std::vector<double> cost_ratios;
  /// test id -> number of solutions that selected it
  std::map<std::string, std::size_t> selection_frequency;
  bool highly_redundant = false;
};

/// Kept-cost ratios across seeds. Flags the instance as highly redundant
/// when the median kept-cost ratio is at most 1%.
RedundancyReport redundancy_report(const RtsmInstance& instance,
                                   const std::vector<Solution>& solutions);

struct MethodSummary {
  std::string method;
  std::size_t records = 0;
  std::size_t timeouts = 0;
  Summary cost_reduction;
  Summary tau;
  Summary score;
};

struct MethodComparison {
  std::string better;
  std::string worse;
  std::size_t pairs = 0;
  WilcoxonResult score_test;
};

struct StudyReport {
  std::vector<MethodSummary> methods;
  std::vector<MethodComparison> comparisons;
};

/// Per-method summaries and one-sided paired Wilcoxon comparisons of scores
/// for every ordered pair of methods, paired on (benchmark, seed, fraction).
StudyReport summarize_study(const std::vector<EvalRecord>& records);

}  // namespace biss
