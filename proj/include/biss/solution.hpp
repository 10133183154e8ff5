#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "biss/oracle.hpp"

namespace biss {

/// Selected tests with per-metric weights and the tau they reach.
struct Solution {
  TestSubset tests;
  std::vector<std::vector<double>> weights;  // per metric, aligned with `tests`
  std::vector<double> per_metric_tau;
  double achieved_tau = -1.0;  // worst metric
  double total_cost = 0.0;
  bool feasible = false;

  std::string method;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  bool timed_out = false;
  std::size_t iterations = 0;
};

/// Evaluates `tests` with `oracle` and packages the result.
Solution make_solution(const FeasibilityOracle& oracle, TestSubset tests);

/// Lower cost wins; equal costs fall back to the lexicographically smaller
/// list of test ids.
bool preferable(const TestSubset& a, const TestSubset& b, const RtsmInstance& instance);

/// Wall-clock limit plus the seed and retry count shared by all solvers.
struct SearchBudget {
  using Clock = std::chrono::steady_clock;

  std::optional<Clock::time_point> deadline;
  std::uint64_t rng_seed = 0;
  std::size_t max_merge_retries = 3;

  static SearchBudget unlimited(std::uint64_t seed) { return SearchBudget{std::nullopt, seed, 3}; }
  /// Throws unless `seconds` is positive.
  static SearchBudget for_seconds(double seconds, std::uint64_t seed);

  bool expired() const { return deadline && Clock::now() >= *deadline; }
};

/// Best-so-far record shared between solver stages. Thread-safe.
class ProgressLog {
public:
  struct Entry {
    double seconds;
    double cost;
  };

  ProgressLog() : start_(SearchBudget::Clock::now()) {}

  /// Records `cost` if it improves on the current best.
  void offer(double cost);
  std::optional<double> best() const;
  std::vector<Entry> entries() const;

private:
  mutable std::mutex mutex_;
  SearchBudget::Clock::time_point start_;
  std::vector<Entry> entries_;
};

}  // namespace biss
