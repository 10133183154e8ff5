#include "biss/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biss/error.hpp"

namespace biss {

Ranking Ranking::from_totals(std::vector<double> totals) {
  Ranking r;
  const std::size_t n = totals.size();
  r.order_.resize(n);
  std::iota(r.order_.begin(), r.order_.end(), std::size_t{0});
  std::stable_sort(r.order_.begin(), r.order_.end(),
                   [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });
  r.rank_.resize(n);
  for (std::size_t k = 0; k < n; ++k) r.rank_[r.order_[k]] = k + 1;
  r.totals_ = std::move(totals);
  return r;
}

std::vector<double> subset_totals(const PerformanceMatrix& matrix, const TestSubset& tests) {
  const auto& v = matrix.values();
  std::vector<double> totals(matrix.n_variants(), 0.0);
  for (std::size_t i = 0; i < totals.size(); ++i) {
    double sum = 0.0;
    for (auto t : tests) sum += v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
    totals[i] = sum;
  }
  return totals;
}

Ranking full_ranking(const PerformanceMatrix& matrix) {
  return Ranking::from_totals(subset_totals(matrix, all_tests(matrix.n_tests())));
}

Ranking weighted_ranking(const PerformanceMatrix& matrix, const TestSubset& tests,
                         std::span<const double> weights) {
  if (weights.size() != tests.size()) throw Error("one weight per selected test is required");
  for (auto t : tests)
    if (t >= matrix.n_tests()) throw Error("unknown test index " + std::to_string(t));
  const auto& v = matrix.values();
  std::vector<double> totals(matrix.n_variants(), 0.0);
  for (std::size_t i = 0; i < totals.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < tests.size(); ++k)
      sum += weights[k] * v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(tests[k]));
    totals[i] = sum;
  }
  return Ranking::from_totals(std::move(totals));
}

Ranking weighted_ranking(const PerformanceMatrix& matrix, const std::vector<std::string>& selected,
                         const std::map<std::string, double>& weights) {
  std::vector<std::pair<std::size_t, double>> picked;
  for (const auto& id : selected) {
    auto idx = matrix.find_test(id);
    if (!idx) throw Error("unknown test '" + id + "'");
    auto w = weights.find(id);
    if (w == weights.end()) throw Error("no weight for test '" + id + "'");
    picked.emplace_back(*idx, w->second);
  }
  std::sort(picked.begin(), picked.end());
  TestSubset tests;
  std::vector<double> w;
  for (const auto& [t, weight] : picked) {
    if (!tests.empty() && tests.back() == t) throw Error("test '" + matrix.test_ids()[t] + "' selected twice");
    tests.push_back(t);
    w.push_back(weight);
  }
  return weighted_ranking(matrix, tests, w);
}

double KendallCounts::tau() const {
  if (pairs == 0) return 1.0;
  return static_cast<double>(concordant - discordant) / static_cast<double>(pairs);
}

bool KendallCounts::meets(double target) const {
  if (pairs == 0) return target <= 1.0;
  if (std::isnan(target)) return false;
  if (target > 1.0) return false;
  if (target <= -1.0) return true;
  // target = mantissa * 2^-shift with an integral 53-bit mantissa.
  int exp = 0;
  double frac = std::frexp(target, &exp);
  auto mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int shift = 53 - exp;
  const __int128 rhs = static_cast<__int128>(mantissa) * pairs;
  const __int128 lhs = concordant - discordant;
  // lhs is integral, so lhs >= rhs / 2^shift  <=>  lhs >= ceil(rhs / 2^shift).
  __int128 ceil_rhs;
  if (shift >= 126) {
    ceil_rhs = rhs > 0 ? 1 : 0;
  } else {
    ceil_rhs = -((-rhs) >> shift);
  }
  return lhs >= ceil_rhs;
}

KendallCounts kendall_counts_pairwise(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) throw Error("rankings cover different variant sets");
  KendallCounts k;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool a_before = a.rank(i) < a.rank(j);
      bool b_before = b.rank(i) < b.rank(j);
      if (a_before == b_before)
        ++k.concordant;
      else
        ++k.discordant;
      ++k.pairs;
    }
  }
  return k;
}

namespace {

std::int64_t count_inversions(std::vector<std::size_t>& seq, std::vector<std::size_t>& scratch,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(seq, scratch, lo, mid) + count_inversions(seq, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (seq[i] <= seq[j]) {
      scratch[k++] = seq[i++];
    } else {
      inv += static_cast<std::int64_t>(mid - i);
      scratch[k++] = seq[j++];
    }
  }
  while (i < mid) scratch[k++] = seq[i++];
  while (j < hi) scratch[k++] = seq[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            seq.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

KendallCounts kendall_counts(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) throw Error("rankings cover different variant sets");
  const auto n = static_cast<std::int64_t>(a.size());
  std::vector<std::size_t> seq;
  seq.reserve(a.size());
  for (auto v : a.order()) seq.push_back(b.rank(v));
  std::vector<std::size_t> scratch(seq.size());
  KendallCounts k;
  k.pairs = n * (n - 1) / 2;
  k.discordant = count_inversions(seq, scratch, 0, seq.size());
  k.concordant = k.pairs - k.discordant;
  return k;
}

double kendall_tau(const Ranking& a, const Ranking& b) { return kendall_counts(a, b).tau(); }

double score(double cost_reduction, double tau) {
  if (!(cost_reduction >= 0.0 && cost_reduction <= 1.0))
    throw Error("cost reduction must lie in [0, 1]");
  if (!(tau >= -1.0 && tau <= 1.0)) throw Error("tau must lie in [-1, 1]");
  return (2.0 * cost_reduction + (1.0 + tau)) / 4.0;
}

double cost_reduction(const RtsmInstance& instance, const TestSubset& kept) {
  for (auto t : kept)
    if (t >= instance.n_tests()) throw Error("unknown test index " + std::to_string(t));
  double r = 1.0 - instance.costs().of(kept) / instance.costs().total();
  return std::clamp(r, 0.0, 1.0);
}

}  // namespace biss
