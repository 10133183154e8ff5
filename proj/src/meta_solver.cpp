#include "biss/meta_solver.hpp"

#include <deque>
#include <future>

#include "biss/error.hpp"

namespace biss {

namespace {

constexpr std::size_t kAutoChunk = 64;

// Stream ids keep chunk, merge and restart randomness independent of the
// order in which the work happens.
constexpr std::uint64_t kSplitStream = dc_stream::kSplit;
constexpr std::uint64_t kChunkStream = dc_stream::kChunk;
constexpr std::uint64_t kMergeStream = dc_stream::kMerge;
constexpr std::uint64_t kRestartStream = dc_stream::kRestart;

double seconds_since(SearchBudget::Clock::time_point start) {
  return std::chrono::duration<double>(SearchBudget::Clock::now() - start).count();
}

SubInstance sample_chunk(const RtsmInstance& instance, const TestSubset& chunk,
                         const Sampler& sampler, const SolverConfig& config, Rng rng) {
  FeasibilityOracle oracle(instance, chunk, config.oracle);
  auto out = sampler.sample(chunk, {}, oracle, rng, config.budget);
  if (!oracle.feasible(out.tests)) return {chunk, chunk};
  return {std::move(out.tests), chunk};
}

}  // namespace

std::unique_ptr<Sampler> make_sampler(const SolverConfig& config) {
  switch (config.sampler) {
    case SamplerKind::biss: return std::make_unique<BisectionSampler>();
    case SamplerKind::random: return std::make_unique<RandomSampler>();
    case SamplerKind::greedy: return std::make_unique<GreedySampler>(config.greedy_aggregate);
    case SamplerKind::pca: return std::make_unique<PcaSampler>();
  }
  throw Error("unknown sampler");
}

std::size_t effective_splits(const SolverConfig& config, std::size_t n_tests) {
  std::size_t n = config.n_splits ? *config.n_splits : (n_tests + kAutoChunk - 1) / kAutoChunk;
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(n_tests, 1));
}

std::vector<TestSubset> split(const TestSubset& tests, std::size_t n, Rng& rng) {
  if (n < 1 || n > tests.size())
    throw Error("split count " + std::to_string(n) + " outside [1, " +
                std::to_string(tests.size()) + "]");
  TestSubset shuffled = tests;
  rng.shuffle(shuffled);
  const std::size_t base = tests.size() / n;
  const std::size_t larger = tests.size() % n;
  std::vector<TestSubset> chunks;
  auto it = shuffled.begin();
  for (std::size_t c = 0; c < n; ++c) {
    const auto size = static_cast<std::ptrdiff_t>(base + (c < larger ? 1 : 0));
    chunks.push_back(canonical(TestSubset(it, it + size)));
    it += size;
  }
  return chunks;
}

TestSubset divide_and_conquer(const RtsmInstance& instance, const TestSubset& scope,
                              const SolverConfig& config, const Sampler& sampler, Rng rng,
                              DcStats* stats) {
  DcStats local;
  DcStats& st = stats ? *stats : local;
  const auto& budget = config.budget;

  Rng split_rng = rng.split(kSplitStream);
  auto chunks = split(scope, effective_splits(config, scope.size()), split_rng);

  std::deque<SubInstance> queue;
  if (config.workers > 1 && chunks.size() > 1) {
    std::vector<SubInstance> results(chunks.size());
    for (std::size_t lo = 0; lo < chunks.size(); lo += config.workers) {
      std::vector<std::future<SubInstance>> batch;
      const std::size_t hi = std::min(chunks.size(), lo + config.workers);
      for (std::size_t c = lo; c < hi; ++c)
        batch.push_back(std::async(std::launch::async, sample_chunk, std::cref(instance),
                                   std::cref(chunks[c]), std::cref(sampler), std::cref(config),
                                   rng.split(kChunkStream + c)));
      for (std::size_t c = lo; c < hi; ++c) results[c] = batch[c - lo].get();
    }
    queue.assign(results.begin(), results.end());
  } else {
    for (std::size_t c = 0; c < chunks.size(); ++c)
      queue.push_back(sample_chunk(instance, chunks[c], sampler, config, rng.split(kChunkStream + c)));
  }

  if (st.keep_history) st.history.insert(st.history.end(), queue.begin(), queue.end());

  std::uint64_t merge_index = 0;
  while (queue.size() > 1) {
    if (budget.expired()) break;
    SubInstance a = std::move(queue.front());
    queue.pop_front();
    SubInstance b = std::move(queue.front());
    queue.pop_front();

    const TestSubset merged = set_union(a.solution, b.solution);
    const TestSubset context = set_union(a.context, b.context);
    FeasibilityOracle whole(instance, context, config.oracle);
    FeasibilityOracle local_oracle(instance, merged, config.oracle);

    std::optional<TestSubset> accepted;
    const std::size_t attempts = sampler.deterministic() ? 1 : std::max<std::size_t>(budget.max_merge_retries, 1);
    for (std::size_t r = 0; r < attempts && !accepted; ++r) {
      if (r > 0) ++st.merge_retries;
      Rng merge_rng = rng.split(kMergeStream + merge_index * 64 + r);
      auto out = sampler.sample(merged, {}, local_oracle, merge_rng, budget);
      if (whole.feasible(out.tests)) accepted = std::move(out.tests);
      if (budget.expired()) break;
    }
    if (!accepted) {
      ++st.merge_fallbacks;
      accepted = whole.feasible(merged) ? merged : context;
    }
    ++st.merges;
    ++merge_index;
    queue.push_back({std::move(*accepted), context});
    if (st.keep_history) st.history.push_back(queue.back());
  }

  if (queue.size() == 1) {
    st.timed_out = budget.expired();
    return queue.front().solution;
  }

  // Deadline hit with several sub-instances still queued.
  st.timed_out = true;
  TestSubset combined;
  for (const auto& sub : queue) combined = set_union(combined, sub.solution);
  FeasibilityOracle whole(instance, scope, config.oracle);
  return whole.feasible(combined) ? combined : scope;
}

Solution divide_and_conquer(const RtsmInstance& instance, const SolverConfig& config) {
  const auto start = SearchBudget::Clock::now();
  auto sampler = make_sampler(config);
  const auto every = all_tests(instance.n_tests());
  Rng rng(config.budget.rng_seed);
  DcStats stats;
  TestSubset tests = divide_and_conquer(instance, every, config, *sampler, rng.split(kRestartStream), &stats);
  FeasibilityOracle full(instance, every, config.oracle);
  Solution s = make_solution(full, std::move(tests));
  s.method = sampler->name();
  s.seed = config.budget.rng_seed;
  s.timed_out = stats.timed_out;
  s.iterations = 1;
  s.wall_seconds = seconds_since(start);
  return s;
}

Solution iterative_solve(const RtsmInstance& instance, const SolverConfig& config,
                         ProgressLog* progress) {
  const auto start = SearchBudget::Clock::now();
  auto sampler = make_sampler(config);
  const auto every = all_tests(instance.n_tests());
  const auto& costs = instance.costs();
  FeasibilityOracle full(instance, every, config.oracle);
  Rng rng(config.budget.rng_seed);

  if (progress) progress->offer(costs.total());
  DcStats stats;
  TestSubset best = divide_and_conquer(instance, every, config, *sampler, rng.split(kRestartStream), &stats);
  bool timed_out = stats.timed_out;
  std::size_t iterations = 1;
  if (progress) progress->offer(costs.of(best));

  double previous_cost = costs.total();
  std::uint64_t stream = kRestartStream + 1;
  while (costs.of(best) < previous_cost && best.size() > 1 && !config.budget.expired()) {
    previous_cost = costs.of(best);
    bool improved = false;
    const std::size_t attempts = std::max<std::size_t>(config.budget.max_merge_retries, 1);
    for (std::size_t r = 0; r < attempts; ++r) {
      DcStats pass;
      TestSubset candidate = divide_and_conquer(instance, best, config, *sampler, rng.split(stream++), &pass);
      ++iterations;
      timed_out = timed_out || pass.timed_out;
      // Valid for the previous solution's tests; it must also hold for all tests.
      if (costs.of(candidate) < previous_cost && full.feasible(candidate)) {
        best = std::move(candidate);
        improved = true;
        break;
      }
      if (config.budget.expired()) break;
    }
    if (progress) progress->offer(costs.of(best));
    if (!improved) break;
  }

  if (!full.feasible(best)) best = every;
  Solution s = make_solution(full, std::move(best));
  s.method = sampler->name();
  s.seed = config.budget.rng_seed;
  s.timed_out = timed_out || config.budget.expired();
  s.iterations = iterations;
  s.wall_seconds = seconds_since(start);
  return s;
}

}  // namespace biss
