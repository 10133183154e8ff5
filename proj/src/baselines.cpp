#include "biss/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biss/error.hpp"

namespace biss {

namespace {

double column_variance(const Eigen::MatrixXd& values, std::size_t column) {
  auto col = values.col(static_cast<Eigen::Index>(column));
  const double mean = col.mean();
  double ss = 0.0;
  for (Eigen::Index i = 0; i < col.size(); ++i) ss += (col(i) - mean) * (col(i) - mean);
  return ss / static_cast<double>(col.size());
}

/// Removable tests sorted by ascending key, ties by index.
TestSubset ordered_by(const TestSubset& tests, const std::vector<double>& key) {
  TestSubset out = tests;
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return out;
}

Solution package(FeasibilityOracle& oracle, SampleOutcome out, const std::string& method,
                 std::uint64_t seed, SearchBudget::Clock::time_point start) {
  Solution s = make_solution(oracle, std::move(out.tests));
  s.method = method;
  s.seed = seed;
  s.timed_out = out.truncated;
  s.iterations = 1;
  s.wall_seconds = std::chrono::duration<double>(SearchBudget::Clock::now() - start).count();
  return s;
}

}  // namespace

std::vector<double> variance_priority(const RtsmInstance& instance, VarianceAggregate aggregate) {
  const std::size_t n = instance.n_tests();
  std::vector<double> priority(n, aggregate == VarianceAggregate::min ? INFINITY : 0.0);
  for (const auto& m : instance.matrices()) {
    std::vector<double> var(n);
    double mean_var = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      var[t] = column_variance(m.values(), t);
      mean_var += var[t];
    }
    mean_var /= static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double standardized = mean_var > 0.0 ? var[t] / mean_var : 0.0;
      if (aggregate == VarianceAggregate::min)
        priority[t] = std::min(priority[t], standardized);
      else
        priority[t] += standardized / static_cast<double>(instance.n_metrics());
    }
  }
  return priority;
}

std::vector<double> principal_loadings(const RtsmInstance& instance, const TestSubset& tests) {
  const auto nv = static_cast<Eigen::Index>(instance.n_variants());
  const auto nm = static_cast<Eigen::Index>(instance.n_metrics());
  const auto nt = static_cast<Eigen::Index>(tests.size());
  Eigen::MatrixXd data(nv * nm, nt);
  bool any_variance = false;
  for (Eigen::Index m = 0; m < nm; ++m) {
    const auto& values = instance.matrix(static_cast<std::size_t>(m)).values();
    for (Eigen::Index k = 0; k < nt; ++k) {
      Eigen::VectorXd col = values.col(static_cast<Eigen::Index>(tests[static_cast<std::size_t>(k)]));
      col.array() -= col.mean();
      const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(nv));
      if (sd > 0.0) {
        col /= sd;
        any_variance = true;
      } else {
        col.setZero();
      }
      data.block(m * nv, k, nv, 1) = col;
    }
  }
  if (!any_variance) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinV);
  if (svd.singularValues().size() == 0 || !(svd.singularValues()(0) > 0.0)) return {};
  Eigen::VectorXd direction = svd.matrixV().col(0);
  std::vector<double> loadings(tests.size());
  for (Eigen::Index k = 0; k < nt; ++k) loadings[static_cast<std::size_t>(k)] = std::abs(direction(k));
  return loadings;
}

SampleOutcome RandomSampler::sample(const TestSubset& removable, const TestSubset& necessary,
                                    FeasibilityOracle& oracle, Rng& rng,
                                    const SearchBudget& budget) const {
  TestSubset current = set_union(necessary, removable);
  TestSubset pool = removable;
  while (current.size() > 1 && !pool.empty()) {
    TestSubset order = pool;
    rng.shuffle(order);
    bool shrunk = false;
    for (auto t : order) {
      if (budget.expired()) return {current, true};
      TestSubset candidate = without(current, t);
      if (oracle.feasible(candidate)) {
        current = std::move(candidate);
        pool = without(pool, t);
        shrunk = true;
        break;
      }
    }
    if (!shrunk) break;
  }
  return {current, false};
}

SampleOutcome GreedySampler::sample(const TestSubset& removable, const TestSubset& necessary,
                                    FeasibilityOracle& oracle, Rng&,
                                    const SearchBudget& budget) const {
  TestSubset current = set_union(necessary, removable);
  const auto priority = variance_priority(oracle.instance(), aggregate_);
  for (auto t : ordered_by(removable, priority)) {
    if (current.size() <= 1) break;
    if (budget.expired()) return {current, true};
    TestSubset candidate = without(current, t);
    if (oracle.feasible(candidate)) current = std::move(candidate);
  }
  return {current, false};
}

SampleOutcome PcaSampler::sample(const TestSubset& removable, const TestSubset& necessary,
                                 FeasibilityOracle& oracle, Rng&,
                                 const SearchBudget& budget) const {
  const auto& instance = oracle.instance();
  TestSubset current = set_union(necessary, removable);
  TestSubset pool = removable;
  std::vector<double> fallback;
  while (current.size() > 1 && !pool.empty()) {
    std::vector<double> key(instance.n_tests(), 0.0);
    auto loadings = principal_loadings(instance, current);
    if (loadings.empty()) {
      if (fallback.empty()) fallback = variance_priority(instance);
      key = fallback;
    } else {
      for (std::size_t k = 0; k < current.size(); ++k) key[current[k]] = loadings[k];
    }
    bool removed = false;
    for (auto t : ordered_by(pool, key)) {
      if (budget.expired()) return {current, true};
      TestSubset candidate = without(current, t);
      if (oracle.feasible(candidate)) {
        current = std::move(candidate);
        pool = without(pool, t);
        removed = true;
        break;
      }
    }
    if (!removed) break;
  }
  return {current, false};
}

Solution random_search_step(const TestSubset& current, const RtsmInstance& instance, Rng& rng,
                            const SearchBudget& budget, const OracleOptions& options) {
  const auto start = SearchBudget::Clock::now();
  FeasibilityOracle oracle(instance, all_tests(instance.n_tests()), options);
  TestSubset start_set = canonical(current);
  if (!oracle.feasible(start_set)) throw Error("random search must start from a feasible set");
  auto out = RandomSampler().sample(start_set, {}, oracle, rng, budget);
  return package(oracle, std::move(out), "random", budget.rng_seed, start);
}

Solution greedy_minimize(const RtsmInstance& instance, const SearchBudget& budget,
                         VarianceAggregate aggregate, const OracleOptions& options) {
  const auto start = SearchBudget::Clock::now();
  const auto every = all_tests(instance.n_tests());
  FeasibilityOracle oracle(instance, every, options);
  Rng unused(0);
  auto out = GreedySampler(aggregate).sample(every, {}, oracle, unused, budget);
  return package(oracle, std::move(out), "greedy", budget.rng_seed, start);
}

Solution pca_minimize(const RtsmInstance& instance, const SearchBudget& budget,
                      const OracleOptions& options) {
  const auto start = SearchBudget::Clock::now();
  const auto every = all_tests(instance.n_tests());
  FeasibilityOracle oracle(instance, every, options);
  Rng unused(0);
  auto out = PcaSampler().sample(every, {}, oracle, unused, budget);
  return package(oracle, std::move(out), "pca", budget.rng_seed, start);
}

}  // namespace biss
