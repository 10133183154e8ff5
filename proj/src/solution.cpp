#include "biss/solution.hpp"

#include <algorithm>

#include "biss/error.hpp"

namespace biss {

Solution make_solution(const FeasibilityOracle& oracle, TestSubset tests) {
  Solution s;
  OracleResult r = oracle.evaluate(tests);
  s.tests = std::move(tests);
  s.weights = std::move(r.weights);
  s.per_metric_tau = r.per_metric_tau;
  s.achieved_tau = r.worst_tau();
  s.total_cost = oracle.instance().costs().of(s.tests);
  s.feasible = r.feasible;
  return s;
}

bool preferable(const TestSubset& a, const TestSubset& b, const RtsmInstance& instance) {
  const double ca = instance.costs().of(a);
  const double cb = instance.costs().of(b);
  if (ca != cb) return ca < cb;
  std::vector<std::string> ia, ib;
  for (auto t : a) ia.push_back(instance.test_ids()[t]);
  for (auto t : b) ib.push_back(instance.test_ids()[t]);
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  return ia < ib;
}

SearchBudget SearchBudget::for_seconds(double seconds, std::uint64_t seed) {
  if (!(seconds > 0.0)) throw Error("deadline must be positive");
  auto span = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
  return SearchBudget{Clock::now() + span, seed, 3};
}

void ProgressLog::offer(double cost) {
  std::lock_guard lock(mutex_);
  if (!entries_.empty() && cost >= entries_.back().cost) return;
  double t = std::chrono::duration<double>(SearchBudget::Clock::now() - start_).count();
  entries_.push_back({t, cost});
}

std::optional<double> ProgressLog::best() const {
  std::lock_guard lock(mutex_);
  if (entries_.empty()) return std::nullopt;
  return entries_.back().cost;
}

std::vector<ProgressLog::Entry> ProgressLog::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

}  // namespace biss
