#include "biss/bisection.hpp"

#include <bit>

#include "biss/error.hpp"

namespace biss {

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::biss: return "biss";
    case SamplerKind::random: return "random";
    case SamplerKind::greedy: return "greedy";
    case SamplerKind::pca: return "pca";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "biss") return SamplerKind::biss;
  if (name == "random") return SamplerKind::random;
  if (name == "greedy") return SamplerKind::greedy;
  if (name == "pca") return SamplerKind::pca;
  throw Error("unknown method '" + name + "'");
}

Partition find_necessary(TestSubset removable, TestSubset necessary, FeasibilityOracle& oracle,
                         const SearchBudget& budget) {
  Partition part;
  // Moving a test between the two sets never changes their union.
  const TestSubset working = set_union(necessary, removable);
  part.necessary = std::move(necessary);
  for (std::size_t k = 0; k < removable.size(); ++k) {
    const auto t = removable[k];
    if (budget.expired()) {
      part.removable.insert(part.removable.end(), removable.begin() + static_cast<std::ptrdiff_t>(k),
                            removable.end());
      part.partial = true;
      break;
    }
    if (oracle.feasible(without(working, t)))
      part.removable.push_back(t);
    else
      part.necessary.push_back(t);
  }
  part.necessary = canonical(std::move(part.necessary));
  return part;
}

std::pair<TestSubset, TestSubset> split_half(const TestSubset& set, Rng& rng) {
  TestSubset shuffled = set;
  rng.shuffle(shuffled);
  const auto half = static_cast<std::ptrdiff_t>(set.size() / 2);
  TestSubset a(shuffled.begin(), shuffled.begin() + half);
  TestSubset b(shuffled.begin() + half, shuffled.end());
  return {canonical(std::move(a)), canonical(std::move(b))};
}

namespace {

struct Search {
  FeasibilityOracle& oracle;
  const SearchBudget& budget;
  std::size_t max_depth;
  bool truncated = false;

  TestSubset run(TestSubset removable, TestSubset necessary, Rng rng, std::size_t depth) {
    if (budget.expired() || depth > max_depth) {
      truncated = truncated || budget.expired();
      return set_union(necessary, removable);
    }
    Partition part = find_necessary(std::move(removable), std::move(necessary), oracle, budget);
    if (part.partial) {
      truncated = true;
      return set_union(part.necessary, part.removable);
    }
    if (part.removable.empty()) return part.necessary;

    auto [a, b] = split_half(part.removable, rng);
    const auto& n = part.necessary;
    if (oracle.feasible(set_union(a, n))) return run(std::move(a), n, rng.split(1), depth + 1);
    if (oracle.feasible(set_union(b, n))) return run(std::move(b), n, rng.split(2), depth + 1);

    TestSubset with_a = run(b, set_union(a, n), rng.split(3), depth + 1);
    TestSubset with_b = run(a, set_union(b, n), rng.split(4), depth + 1);
    return preferable(with_b, with_a, oracle.instance()) ? with_b : with_a;
  }
};

}  // namespace

SampleOutcome BisectionSampler::sample(const TestSubset& removable, const TestSubset& necessary,
                                       FeasibilityOracle& oracle, Rng& rng,
                                       const SearchBudget& budget) const {
  const std::size_t log2 = removable.empty() ? 0 : std::bit_width(removable.size()) - 1;
  Search search{oracle, budget, log2 + extra_depth_};
  TestSubset out = search.run(removable, necessary, rng.split(0), 0);
  if (!oracle.feasible(out)) {
    // Only reachable if the caller's feasibility guarantee was violated.
    out = set_union(necessary, removable);
  }
  return {std::move(out), search.truncated};
}

Solution bisection_sample(const TestSubset& removable, const TestSubset& necessary,
                          const TestSubset& context, const RtsmInstance& instance,
                          const SearchBudget& budget, const OracleOptions& options) {
  TestSubset r = canonical(removable);
  TestSubset n = canonical(necessary);
  if (!set_difference(r, set_difference(r, n)).empty())
    throw Error("necessary and removable tests must be disjoint");
  if (!is_subset(set_union(r, n), canonical(context)))
    throw Error("working set must lie inside the context");
  FeasibilityOracle oracle(instance, context, options);
  Rng rng(budget.rng_seed);
  const auto start = SearchBudget::Clock::now();
  SampleOutcome out = BisectionSampler().sample(r, n, oracle, rng, budget);
  Solution s = make_solution(oracle, std::move(out.tests));
  s.method = "biss";
  s.seed = budget.rng_seed;
  s.timed_out = out.truncated;
  s.iterations = 1;
  s.wall_seconds = std::chrono::duration<double>(SearchBudget::Clock::now() - start).count();
  return s;
}

}  // namespace biss
