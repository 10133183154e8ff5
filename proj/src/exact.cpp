#include "biss/exact.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "biss/error.hpp"
#include "biss/ranking.hpp"

namespace biss {

ExactModel ExactModel::build(const RtsmInstance& instance) {
  ExactModel model;
  model.n_tests = instance.n_tests();
  model.costs = instance.costs().values();
  const std::size_t nv = instance.n_variants();
  for (std::size_t m = 0; m < instance.n_metrics(); ++m) {
    const auto& matrix = instance.matrix(m);
    Ranking reference = full_ranking(matrix);
    for (std::size_t k = 0; k < nv; ++k) {
      for (std::size_t l = k + 1; l < nv; ++l) {
        const bool k_higher = reference.rank(k) < reference.rank(l);
        const std::size_t hi = k_higher ? k : l;
        const std::size_t lo = k_higher ? l : k;
        PairConstraint c{m, hi, lo, std::vector<double>(model.n_tests), hi > lo};
        for (std::size_t t = 0; t < model.n_tests; ++t) c.diff[t] = matrix(hi, t) - matrix(lo, t);
        // (k, l) and (l, k), stored adjacently.
        model.constraints.push_back(c);
        model.constraints.push_back(std::move(c));
      }
    }
  }
  return model;
}

bool unit_weights_preserve_ranking(const RtsmInstance& instance, const TestSubset& tests) {
  if (tests.empty()) return false;
  for (const auto& m : instance.matrices()) {
    if (!(Ranking::from_totals(subset_totals(m, tests)) == full_ranking(m))) return false;
  }
  return true;
}

namespace {

/// Deduplicated pair constraints with a per-row tolerance for the cheap
/// incremental screen. The screen is permissive; every candidate it passes is
/// confirmed with the canonical ranking check.
struct Screen {
  std::vector<std::vector<double>> diff;  // [pair][test]
  std::vector<double> tol;

  explicit Screen(const ExactModel& model) {
    for (std::size_t c = 0; c < model.constraints.size(); c += 2) {
      const auto& row = model.constraints[c].diff;
      double scale = 0.0;
      for (double d : row) scale += std::abs(d);
      diff.push_back(row);
      tol.push_back(1e-9 * (scale + 1.0));
    }
  }

  bool passes(const std::vector<double>& sums) const {
    for (std::size_t p = 0; p < sums.size(); ++p)
      if (sums[p] < -tol[p]) return false;
    return true;
  }
};

struct Incumbent {
  TestSubset tests;
  double cost = std::numeric_limits<double>::infinity();
};

bool consider(const RtsmInstance& instance, const TestSubset& tests, Incumbent& best) {
  const double c = instance.costs().of(tests);
  if (c > best.cost) return false;
  if (c == best.cost && !preferable(tests, best.tests, instance)) return false;
  if (!unit_weights_preserve_ranking(instance, tests)) return false;
  best.tests = tests;
  best.cost = c;
  return true;
}

Incumbent exhaustive(const RtsmInstance& instance, const Screen& screen) {
  const std::size_t n = instance.n_tests();
  Incumbent best;
  std::vector<double> sums(screen.diff.size(), 0.0);
  std::uint64_t gray = 0;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(i));
    gray ^= 1ULL << bit;
    const double sign = (gray >> bit) & 1ULL ? 1.0 : -1.0;
    for (std::size_t p = 0; p < sums.size(); ++p) sums[p] += sign * screen.diff[p][bit];
    if (!screen.passes(sums)) continue;
    TestSubset tests;
    for (std::size_t t = 0; t < n; ++t)
      if ((gray >> t) & 1ULL) tests.push_back(t);
    consider(instance, tests, best);
  }
  return best;
}

struct BranchAndBound {
  const RtsmInstance& instance;
  const Screen& screen;
  std::vector<std::size_t> order;  // tests by ascending cost
  Incumbent best;

  void search(std::size_t depth, TestSubset& chosen, std::vector<double>& sums, double cost) {
    if (cost > best.cost) return;
    if (!chosen.empty() && screen.passes(sums)) {
      if (consider(instance, canonical(chosen), best)) return;
    }
    if (depth == order.size()) return;

    // Lower bound: every violated pair needs at least one remaining test that
    // moves it in the right direction.
    double bound = 0.0;
    for (std::size_t p = 0; p < sums.size(); ++p) {
      if (sums[p] >= -screen.tol[p]) continue;
      double cheapest = std::numeric_limits<double>::infinity();
      for (std::size_t k = depth; k < order.size(); ++k) {
        if (screen.diff[p][order[k]] > 0.0) {
          cheapest = instance.costs()[order[k]];
          break;
        }
      }
      if (!std::isfinite(cheapest)) return;
      bound = std::max(bound, cheapest);
    }
    if (cost + bound > best.cost) return;

    const std::size_t t = order[depth];
    chosen.push_back(t);
    for (std::size_t p = 0; p < sums.size(); ++p) sums[p] += screen.diff[p][t];
    search(depth + 1, chosen, sums, cost + instance.costs()[t]);
    for (std::size_t p = 0; p < sums.size(); ++p) sums[p] -= screen.diff[p][t];
    chosen.pop_back();
    search(depth + 1, chosen, sums, cost);
  }
};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

TestSubset run_external(const ExactModel& model, const ExactOptions& options) {
  if (options.external_command.empty()) throw Error("external exact backend needs a command");
  namespace fs = std::filesystem;
  const fs::path dir = options.work_dir;
  const fs::path problem = dir / "exact_model.lp";
  const fs::path solution = dir / "exact_model.sol";
  {
    std::ofstream out(problem);
    if (!out) throw Error("cannot write " + problem.string());
    write_lp(model, out);
  }
  std::string cmd = replace_all(options.external_command, "{problem}", problem.string());
  cmd = replace_all(cmd, "{solution}", solution.string());
  if (std::system(cmd.c_str()) != 0) throw Error("external solver failed: " + cmd);
  std::ifstream in(solution);
  if (!in) throw Error("external solver wrote no solution file " + solution.string());
  return read_lp_solution(in, model.n_tests);
}

}  // namespace

Solution exact_minimize(const RtsmInstance& instance, const ExactOptions& options) {
  if (instance.target_tau() != 1.0) throw Error("exact backend supports tau = 1 only");
  const auto start = SearchBudget::Clock::now();
  const ExactModel model = ExactModel::build(instance);
  const std::size_t n = instance.n_tests();

  TestSubset best;
  if (options.backend == ExactBackendKind::external) {
    best = run_external(model, options);
    if (!unit_weights_preserve_ranking(instance, best))
      throw Error("external solver returned a subset that does not preserve the ranking");
  } else {
    const Screen screen(model);
    Incumbent found;
    if (n <= options.exhaustive_limit && n < 63) {
      found = exhaustive(instance, screen);
    } else if (n <= options.branch_and_bound_limit) {
      BranchAndBound bb{instance, screen, all_tests(n), {}};
      std::stable_sort(bb.order.begin(), bb.order.end(), [&](std::size_t a, std::size_t b) {
        return instance.costs()[a] < instance.costs()[b];
      });
      // Keeping everything is always feasible and seeds the bound.
      bb.best.tests = all_tests(n);
      bb.best.cost = instance.costs().total();
      TestSubset chosen;
      std::vector<double> sums(screen.diff.size(), 0.0);
      bb.search(0, chosen, sums, 0.0);
      found = bb.best;
    } else {
      throw Error("exact backend handles at most " + std::to_string(options.branch_and_bound_limit) +
                  " tests, instance has " + std::to_string(n));
    }
    best = found.tests.empty() ? all_tests(n) : found.tests;
  }

  Solution s;
  s.tests = best;
  for (std::size_t m = 0; m < instance.n_metrics(); ++m) {
    s.weights.emplace_back(best.size(), 1.0);
    s.per_metric_tau.push_back(
        kendall_tau(full_ranking(instance.matrix(m)),
                    weighted_ranking(instance.matrix(m), best, s.weights.back())));
  }
  s.achieved_tau = *std::min_element(s.per_metric_tau.begin(), s.per_metric_tau.end());
  s.total_cost = instance.costs().of(best);
  s.feasible = s.achieved_tau >= 1.0;
  s.method = "exact";
  s.iterations = 1;
  s.wall_seconds = std::chrono::duration<double>(SearchBudget::Clock::now() - start).count();
  return s;
}

void write_lp(const ExactModel& model, std::ostream& out, double epsilon) {
  out.precision(17);
  out << "\\ unit-weight ranking-preserving test selection\n";
  out << "Minimize\n obj:";
  for (std::size_t i = 0; i < model.n_tests; ++i) out << " + " << model.costs[i] << " u" << i;
  out << "\nSubject To\n";
  std::size_t row = 0;
  for (const auto& c : model.constraints) {
    out << " r" << row++ << ":";
    for (std::size_t i = 0; i < model.n_tests; ++i) {
      if (c.diff[i] == 0.0) continue;
      out << (c.diff[i] < 0 ? " - " : " + ") << std::abs(c.diff[i]) << " u" << i;
    }
    out << " >= " << (c.strict ? epsilon : 0.0) << "\n";
  }
  out << " nonempty:";
  for (std::size_t i = 0; i < model.n_tests; ++i) out << " + u" << i;
  out << " >= 1\nBinary\n";
  for (std::size_t i = 0; i < model.n_tests; ++i) out << " u" << i << "\n";
  out << "End\n";
}

TestSubset read_lp_solution(std::istream& in, std::size_t n_tests) {
  TestSubset chosen;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::vector<std::string> words;
    for (std::string w; tokens >> w;) words.push_back(w);
    for (std::size_t k = 0; k < words.size(); ++k) {
      const auto& w = words[k];
      if (w.size() < 2 || w[0] != 'u') continue;
      std::size_t index = 0;
      auto [p, ec] = std::from_chars(w.data() + 1, w.data() + w.size(), index);
      if (ec != std::errc() || p != w.data() + w.size()) continue;
      if (index >= n_tests) throw Error("solution refers to unknown variable " + w);
      for (std::size_t j = k + 1; j < words.size(); ++j) {
        double value = 0.0;
        auto [q, ec2] = std::from_chars(words[j].data(), words[j].data() + words[j].size(), value);
        if (ec2 == std::errc() && q == words[j].data() + words[j].size()) {
          if (value > 0.5) chosen.push_back(index);
          break;
        }
      }
      break;
    }
  }
  return canonical(std::move(chosen));
}

}  // namespace biss
