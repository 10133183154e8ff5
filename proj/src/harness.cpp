#include "biss/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <tuple>

#include "biss/error.hpp"
#include "biss/ranking.hpp"

namespace biss {

bool is_known_method(const std::string& method) {
  return method == "biss" || method == "random" || method == "greedy" || method == "pca" ||
         method == "exact";
}

Solution run_method(const RtsmInstance& instance, const std::string& method, std::uint64_t seed,
                    const MethodConfig& config, ProgressLog* progress) {
  if (method == "exact") {
    Solution s = exact_minimize(instance, config.exact);
    s.seed = seed;
    if (progress) progress->offer(s.total_cost);
    return s;
  }
  SolverConfig solver;
  solver.sampler = parse_sampler_kind(method);
  solver.n_splits = config.n_splits;
  solver.budget = config.deadline_seconds > 0.0 ? SearchBudget::for_seconds(config.deadline_seconds, seed)
                                                : SearchBudget::unlimited(seed);
  solver.budget.max_merge_retries = config.max_merge_retries;
  solver.oracle = config.oracle;
  solver.greedy_aggregate = config.greedy_aggregate;
  solver.workers = config.workers;
  return iterative_solve(instance, solver, progress);
}

std::vector<std::size_t> sample_variants(std::size_t n_variants, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("variant fraction must lie in (0, 1]");
  const double raw = fraction * static_cast<double>(n_variants);
  // Guard against products like 0.3 * 10 landing just above an integer.
  auto keep = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  keep = std::min(keep, n_variants);
  std::vector<std::size_t> rows = all_tests(n_variants);
  if (keep == n_variants) return rows;
  Rng rng = Rng(seed).split(static_cast<std::uint64_t>(std::llround(fraction * 1e6)));
  rng.shuffle(rows);
  rows.resize(keep);
  std::sort(rows.begin(), rows.end());
  return rows;
}

double tau_on_instance(const RtsmInstance& instance, const TestSubset& tests,
                       const std::vector<std::vector<double>>& weights) {
  if (weights.size() != instance.n_metrics()) throw Error("one weight vector per metric is required");
  double worst = 1.0;
  for (std::size_t m = 0; m < instance.n_metrics(); ++m) {
    const auto& matrix = instance.matrix(m);
    worst = std::min(worst, kendall_tau(full_ranking(matrix), weighted_ranking(matrix, tests, weights[m])));
  }
  return worst;
}

namespace {

struct Cell {
  std::size_t instance;
  std::string method;
  std::uint64_t seed;
  double fraction;
};

EvalRecord run_cell(const StudyInstance& item, const Cell& cell, const StudyConfig& config) {
  EvalRecord rec;
  rec.benchmark_id = item.id;
  rec.method = cell.method;
  rec.seed = cell.seed;
  rec.variant_fraction = cell.fraction;

  const auto rows = sample_variants(item.instance.n_variants(), cell.fraction, cell.seed);
  rec.n_variants_used = rows.size();
  if (rows.size() < 2) {
    rec.skipped = true;
    rec.note = "fraction keeps fewer than two variants";
    return rec;
  }
  const RtsmInstance restricted =
      rows.size() == item.instance.n_variants() ? item.instance : item.instance.restrict_variants(rows);
  Solution s = run_method(restricted, cell.method, cell.seed, config.method);

  auto weights = s.weights;
  if (config.refit_on_full) {
    weights.clear();
    for (const auto& m : item.instance.matrices()) weights.push_back(fit_weights(m, s.tests, config.method.oracle).weights);
  }
  rec.cost_reduction = cost_reduction(item.instance, s.tests);
  rec.tau_on_full = tau_on_instance(item.instance, s.tests, weights);
  rec.score = score(rec.cost_reduction, rec.tau_on_full);
  rec.wall_seconds = s.wall_seconds;
  rec.timed_out = s.timed_out;
  rec.iterations = s.iterations;
  rec.n_selected = s.tests.size();
  return rec;
}

}  // namespace

std::vector<EvalRecord> run_matrix_study(const std::vector<StudyInstance>& instances,
                                         const StudyConfig& config) {
  for (const auto& m : config.methods)
    if (!is_known_method(m)) throw Error("unknown method '" + m + "'");
  for (double f : config.fractions)
    if (!(f > 0.0 && f <= 1.0)) throw Error("variant fraction must lie in (0, 1]");

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (const auto& m : config.methods)
      for (auto seed : config.seeds)
        for (double f : config.fractions) cells.push_back({i, m, seed, f});

  std::vector<EvalRecord> records(cells.size());
  const std::size_t workers = std::max<std::size_t>(config.workers, 1);
  for (std::size_t lo = 0; lo < cells.size(); lo += workers) {
    const std::size_t hi = std::min(cells.size(), lo + workers);
    if (workers == 1) {
      records[lo] = run_cell(instances[cells[lo].instance], cells[lo], config);
      continue;
    }
    std::vector<std::future<EvalRecord>> batch;
    for (std::size_t c = lo; c < hi; ++c)
      batch.push_back(std::async(std::launch::async, run_cell, std::cref(instances[cells[c].instance]),
                                 std::cref(cells[c]), std::cref(config)));
    for (std::size_t c = lo; c < hi; ++c) records[c] = batch[c - lo].get();
  }

  std::sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    return std::tie(a.benchmark_id, a.method, a.variant_fraction, a.seed) <
           std::tie(b.benchmark_id, b.method, b.variant_fraction, b.seed);
  });
  return records;
}

GroupField parse_group_field(const std::string& name) {
  if (name == "method") return GroupField::method;
  if (name == "benchmark" || name == "benchmark_id") return GroupField::benchmark;
  if (name == "fraction" || name == "variant_fraction") return GroupField::fraction;
  if (name == "seed") return GroupField::seed;
  throw Error("unknown group field '" + name + "'");
}

std::string group_key(const EvalRecord& record, GroupField field) {
  switch (field) {
    case GroupField::method: return record.method;
    case GroupField::benchmark: return record.benchmark_id;
    case GroupField::fraction: {
      std::string s = std::to_string(record.variant_fraction);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return s;
    }
    case GroupField::seed: return std::to_string(record.seed);
  }
  return {};
}

std::vector<CdfPoint> cumulative_score_distribution(const std::vector<EvalRecord>& records,
                                                    GroupField group_by) {
  if (records.empty()) throw Error("no records to summarize");
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : records)
    if (!r.skipped) groups[group_key(r, group_by)].push_back(r.score);
  std::vector<CdfPoint> out;
  for (auto& [key, scores] : groups) {
    std::sort(scores.begin(), scores.end());
    const double n = static_cast<double>(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (i + 1 < scores.size() && scores[i + 1] == scores[i]) continue;
      out.push_back({key, scores[i], static_cast<double>(i + 1) / n});
    }
  }
  return out;
}

RedundancyReport redundancy_report(const RtsmInstance& instance,
                                   const std::vector<Solution>& solutions) {
  if (solutions.size() < 2) throw Error("redundancy report needs solutions from at least two seeds");
  RedundancyReport rep;
  rep.n_solutions = solutions.size();
  const double total = instance.costs().total();
  for (const auto& s : solutions) {
    rep.cost_ratios.push_back(instance.costs().of(s.tests) / total);
    for (auto t : s.tests) ++rep.selection_frequency[instance.test_ids().at(t)];
  }
  Summary sum = summarize(rep.cost_ratios);
  rep.min_cost_ratio = sum.min;
  rep.median_cost_ratio = sum.median;
  rep.highly_redundant = rep.median_cost_ratio <= 0.01;
  return rep;
}

StudyReport summarize_study(const std::vector<EvalRecord>& records) {
  StudyReport rep;
  std::map<std::string, std::vector<const EvalRecord*>> by_method;
  for (const auto& r : records)
    if (!r.skipped) by_method[r.method].push_back(&r);

  using Key = std::tuple<std::string, std::uint64_t, double>;
  std::map<std::string, std::map<Key, double>> scores;
  for (const auto& [method, recs] : by_method) {
    MethodSummary ms;
    ms.method = method;
    ms.records = recs.size();
    std::vector<double> cr, tau, sc;
    for (const auto* r : recs) {
      cr.push_back(r->cost_reduction);
      tau.push_back(r->tau_on_full);
      sc.push_back(r->score);
      ms.timeouts += r->timed_out ? 1 : 0;
      scores[method][{r->benchmark_id, r->seed, r->variant_fraction}] = r->score;
    }
    ms.cost_reduction = summarize(cr);
    ms.tau = summarize(tau);
    ms.score = summarize(sc);
    rep.methods.push_back(std::move(ms));
  }

  for (const auto& [a, sa] : scores) {
    for (const auto& [b, sb] : scores) {
      if (a == b) continue;
      std::vector<double> x, y;
      for (const auto& [key, value] : sa) {
        auto it = sb.find(key);
        if (it == sb.end()) continue;
        x.push_back(value);
        y.push_back(it->second);
      }
      if (x.empty()) continue;
      rep.comparisons.push_back({a, b, x.size(), wilcoxon_greater(x, y)});
    }
  }
  return rep;
}

}  // namespace biss
