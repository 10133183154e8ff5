#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "biss/solution.hpp"

namespace biss {

/// Unit-weight, tau = 1 formulation: choose tests (binary u_i) minimizing
/// total cost so that the summed values order every variant pair exactly as
/// the full ranking does, on every metric.
struct ExactModel {
  struct PairConstraint {
    std::size_t metric;
    std::size_t higher;  // variant ranked above
    std::size_t lower;
    /// sum_i u_i * diff[i] >= 0, or > 0 when `strict`. diff[i] = p(higher, i) - p(lower, i).
    std::vector<double> diff;
    /// Equal totals resolve by variant index, so the pair only survives a tie
    /// when the higher-ranked variant has the smaller index.
    bool strict;
  };

  std::size_t n_tests = 0;
  std::vector<double> costs;
  /// One constraint per ordered variant pair and metric, as written in the
  /// textbook encoding: (k, l) and (l, k) produce the same inequality.
  std::vector<PairConstraint> constraints;

  static ExactModel build(const RtsmInstance& instance);
  std::size_t distinct_constraints() const { return constraints.size() / 2; }
};

enum class ExactBackendKind { internal, external };

struct ExactOptions {
  ExactBackendKind backend = ExactBackendKind::internal;
  /// Exhaustive enumeration up to this many tests, branch and bound above.
  std::size_t exhaustive_limit = 20;
  /// Hard limit for the internal branch and bound.
  std::size_t branch_and_bound_limit = 64;
  /// For the external backend: command with {problem} and {solution}
  /// placeholders, e.g. "cbc {problem} solve solu {solution}".
  std::string external_command;
  std::string work_dir = ".";
};

/// Minimum-cost unit-weight subset. Throws unless the instance's target tau
/// is exactly 1.
Solution exact_minimize(const RtsmInstance& instance, const ExactOptions& options = {});

/// True iff the unit-weight sums over `tests` reproduce every metric's full
/// ranking exactly (canonical left-to-right summation).
bool unit_weights_preserve_ranking(const RtsmInstance& instance, const TestSubset& tests);

/// Writes the model in CPLEX LP format. Variables are named u0, u1, ...;
/// strict inequalities use `epsilon` as right-hand side.
void write_lp(const ExactModel& model, std::ostream& out, double epsilon = 1e-9);

/// Reads a solver solution file: every line whose tokens include a variable
/// name u<index> followed (possibly after other tokens) by a numeric value.
/// Values above 0.5 select the test.
TestSubset read_lp_solution(std::istream& in, std::size_t n_tests);

}  // namespace biss
