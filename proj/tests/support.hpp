#pragma once

// Test-only oracles. Nothing here calls into the ranking, Kendall or
// regression code under test.

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "biss/matrix.hpp"
#include "biss/rng.hpp"

namespace biss::testing {

inline std::vector<std::string> ids(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline PerformanceMatrix matrix_of(const std::vector<std::vector<double>>& rows,
                                   const std::string& name = "perf") {
  Eigen::MatrixXd v(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) v(i, j) = rows[i][j];
  return PerformanceMatrix(ids("v", rows.size()), ids("t", rows.front().size()), v, name);
}

inline RtsmInstance instance_of(const std::vector<std::vector<double>>& rows, double target = 1.0,
                                std::vector<double> costs = {}) {
  auto m = matrix_of(rows);
  const auto n = m.n_tests();
  CostVector c = costs.empty() ? CostVector::unit(n) : CostVector(std::move(costs));
  return RtsmInstance({std::move(m)}, std::move(c), target);
}

inline RtsmInstance random_instance(std::size_t variants, std::size_t tests, std::uint64_t seed,
                                    double target = 1.0, bool integers = false) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(variants, std::vector<double>(tests));
  for (auto& row : rows)
    for (auto& x : row) x = integers ? static_cast<double>(rng.below(10)) : rng.uniform();
  return instance_of(rows, target);
}

/// Rank by counting how many variants beat each one (larger total, or equal
/// total with a smaller index).
inline std::vector<std::size_t> brute_ranks(const std::vector<double>& totals) {
  std::vector<std::size_t> ranks(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    std::size_t better = 0;
    for (std::size_t j = 0; j < totals.size(); ++j)
      if (totals[j] > totals[i] || (totals[j] == totals[i] && j < i)) ++better;
    ranks[i] = better + 1;
  }
  return ranks;
}

struct PairCount {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
};

inline PairCount brute_pairs(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  PairCount c;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i >= j) continue;
      const long long da = static_cast<long long>(a[i]) - static_cast<long long>(a[j]);
      const long long db = static_cast<long long>(b[i]) - static_cast<long long>(b[j]);
      if ((da < 0) == (db < 0))
        ++c.concordant;
      else
        ++c.discordant;
    }
  return c;
}

inline std::vector<double> row_sums(const PerformanceMatrix& m, const std::vector<std::size_t>& cols) {
  std::vector<double> out(m.n_variants(), 0.0);
  for (std::size_t i = 0; i < m.n_variants(); ++i)
    for (auto c : cols) out[i] += m(i, c);
  return out;
}

/// Independent feasibility check: pseudo-inverse least squares through a
/// full SVD, brute-force ranks and pair counts, tau compared as a rational.
inline bool reference_feasible(const RtsmInstance& inst, const std::vector<std::size_t>& subset,
                               const std::vector<std::size_t>& context, double target) {
  if (subset.empty()) return false;
  for (const auto& m : inst.matrices()) {
    auto y = row_sums(m, context);
    std::vector<double> pred;
    if (subset == context) {
      pred = y;
    } else {
      Eigen::MatrixXd x(m.n_variants(), subset.size());
      for (std::size_t k = 0; k < subset.size(); ++k) x.col(k) = m.values().col(subset[k]);
      Eigen::VectorXd yv = Eigen::Map<Eigen::VectorXd>(y.data(), y.size());
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::VectorXd w = svd.solve(yv);
      pred.assign(m.n_variants(), 0.0);
      for (std::size_t i = 0; i < m.n_variants(); ++i)
        for (std::size_t k = 0; k < subset.size(); ++k) pred[i] += w(k) * m(i, subset[k]);
    }
    auto pc = brute_pairs(brute_ranks(y), brute_ranks(pred));
    const long double tau = static_cast<long double>(pc.concordant - pc.discordant) /
                            static_cast<long double>(pc.concordant + pc.discordant);
    if (tau < static_cast<long double>(target)) return false;
  }
  return true;
}

/// Cheapest subset feasible under reference_feasible, by enumeration.
inline double exhaustive_min_cost(const RtsmInstance& inst, double target) {
  const std::size_t n = inst.n_tests();
  std::vector<std::size_t> all;
  for (std::size_t t = 0; t < n; ++t) all.push_back(t);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    std::vector<std::size_t> s;
    double cost = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      if ((mask >> t) & 1ULL) {
        s.push_back(t);
        cost += inst.costs()[t];
      }
    if (cost >= best) continue;
    if (reference_feasible(inst, s, all, target)) best = cost;
  }
  return best;
}

/// Cheapest subset whose unit-weight sums reproduce every metric's ranking.
inline double exhaustive_unit_min_cost(const RtsmInstance& inst) {
  const std::size_t n = inst.n_tests();
  std::vector<std::size_t> all;
  for (std::size_t t = 0; t < n; ++t) all.push_back(t);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    std::vector<std::size_t> s;
    double cost = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      if ((mask >> t) & 1ULL) {
        s.push_back(t);
        cost += inst.costs()[t];
      }
    if (cost >= best) continue;
    bool ok = true;
    for (const auto& m : inst.matrices())
      ok = ok && brute_ranks(row_sums(m, s)) == brute_ranks(row_sums(m, all));
    if (ok) best = cost;
  }
  return best;
}

}  // namespace biss::testing
