#include "biss/oracle.hpp"

#include <algorithm>
#include <limits>

#include "biss/error.hpp"

namespace biss {

namespace {

constexpr std::size_t kMemoLimit = 1u << 16;

double squared_residual(const PerformanceMatrix& matrix, const TestSubset& subset,
                        std::span<const double> weights, std::span<const double> target) {
  const auto& v = matrix.values();
  double total = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    double pred = 0.0;
    for (std::size_t k = 0; k < subset.size(); ++k)
      pred += weights[k] * v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(subset[k]));
    double e = pred - target[i];
    total += e * e;
  }
  return total;
}

WeightFit fit_to_target(const PerformanceMatrix& matrix, const TestSubset& subset,
                        std::span<const double> target, bool identity,
                        const OracleOptions& options) {
  if (subset.empty()) throw Error("cannot fit weights on an empty test subset");
  WeightFit fit;
  if (identity && options.ridge == 0.0) {
    fit.weights.assign(subset.size(), 1.0);
    fit.residual = squared_residual(matrix, subset, fit.weights, target);
    return fit;
  }

  const auto rows = static_cast<Eigen::Index>(matrix.n_variants());
  const auto cols = static_cast<Eigen::Index>(subset.size());
  const bool ridge = options.ridge > 0.0;
  Eigen::MatrixXd design(ridge ? rows + cols : rows, cols);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(design.rows());
  for (Eigen::Index k = 0; k < cols; ++k)
    design.col(k).head(rows) = matrix.values().col(static_cast<Eigen::Index>(subset[k]));
  for (Eigen::Index i = 0; i < rows; ++i) rhs(i) = target[static_cast<std::size_t>(i)];
  if (ridge) {
    design.bottomRows(cols).setZero();
    design.bottomRows(cols).diagonal().setConstant(std::sqrt(options.ridge));
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  Eigen::VectorXd w = cod.solve(rhs);

  fit.weights.resize(subset.size());
  for (Eigen::Index k = 0; k < cols; ++k) {
    double value = w(k);
    if (options.clamp_negative && value < 0.0) value = 0.0;
    fit.weights[static_cast<std::size_t>(k)] = value;
  }
  fit.residual = squared_residual(matrix, subset, fit.weights, target);
  return fit;
}

}  // namespace

WeightFit fit_weights(const PerformanceMatrix& matrix, const TestSubset& subset,
                      const TestSubset& context, const OracleOptions& options) {
  if (subset.empty()) throw Error("cannot fit weights on an empty test subset");
  if (!is_subset(subset, context)) throw Error("subset is not contained in the context");
  if (!context.empty() && context.back() >= matrix.n_tests())
    throw Error("unknown test index " + std::to_string(context.back()));
  auto target = subset_totals(matrix, context);
  return fit_to_target(matrix, subset, target, subset == context, options);
}

WeightFit fit_weights(const PerformanceMatrix& matrix, const TestSubset& subset,
                      const OracleOptions& options) {
  return fit_weights(matrix, subset, all_tests(matrix.n_tests()), options);
}

double OracleResult::worst_tau() const {
  if (per_metric_tau.empty()) return -1.0;
  return *std::min_element(per_metric_tau.begin(), per_metric_tau.end());
}

FeasibilityOracle::FeasibilityOracle(const RtsmInstance& instance, TestSubset context,
                                     OracleOptions options)
    : instance_(&instance), context_(canonical(std::move(context))), options_(options) {
  if (context_.empty()) throw Error("oracle context must contain at least one test");
  if (context_.back() >= instance.n_tests())
    throw Error("unknown test index " + std::to_string(context_.back()));
  reference_.reserve(instance.n_metrics());
  for (const auto& m : instance.matrices())
    reference_.push_back(Ranking::from_totals(subset_totals(m, context_)));
}

OracleResult FeasibilityOracle::evaluate(const TestSubset& subset) const {
  if (subset.empty()) throw Error("cannot evaluate an empty test subset");
  if (!is_subset(subset, context_)) throw Error("subset is not contained in the context");
  OracleResult result;
  const bool identity = subset == context_;
  bool ok = true;
  for (std::size_t m = 0; m < instance_->n_metrics(); ++m) {
    const auto& matrix = instance_->matrix(m);
    const auto& totals = reference_[m].totals();
    WeightFit fit = fit_to_target(matrix, subset, totals, identity, options_);
    Ranking induced = weighted_ranking(matrix, subset, fit.weights);
    KendallCounts counts = kendall_counts(reference_[m], induced);
    ok = ok && counts.meets(instance_->target_tau());
    result.per_metric_counts.push_back(counts);
    result.per_metric_tau.push_back(counts.tau());
    result.weights.push_back(std::move(fit.weights));
    result.fit_residual.push_back(fit.residual);
  }
  result.feasible = ok;
  return result;
}

bool FeasibilityOracle::feasible(const TestSubset& subset) {
  if (subset.empty()) return false;
  const auto h = hash_subset(subset);
  auto& bucket = memo_[h];
  for (const auto& [key, verdict] : bucket) {
    if (key == subset) {
      ++cache_hits_;
      return verdict;
    }
  }
  ++evaluations_;
  bool verdict = evaluate(subset).feasible;
  if (memo_entries_ >= kMemoLimit) {
    memo_.clear();
    memo_entries_ = 0;
  }
  memo_[h].emplace_back(subset, verdict);
  ++memo_entries_;
  return verdict;
}

OracleResult solves(const RtsmInstance& instance, const TestSubset& subset,
                    const OracleOptions& options) {
  return FeasibilityOracle(instance, all_tests(instance.n_tests()), options).evaluate(subset);
}

OracleResult solves_in_context(const TestSubset& context, const TestSubset& subset,
                               const RtsmInstance& instance, const OracleOptions& options) {
  if (!is_subset(subset, context)) throw Error("subset is not contained in the context");
  return FeasibilityOracle(instance, context, options).evaluate(subset);
}

}  // namespace biss
