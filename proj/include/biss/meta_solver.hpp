#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "biss/baselines.hpp"
#include "biss/bisection.hpp"

namespace biss {

/// A solution valid for the tests it was sampled from.
struct SubInstance {
  TestSubset solution;
  TestSubset context;
};

struct SolverConfig {
  /// Number of chunks; unset means ceil(|tests| / 64).
  std::optional<std::size_t> n_splits;
  SamplerKind sampler = SamplerKind::biss;
  SearchBudget budget;
  OracleOptions oracle;
  VarianceAggregate greedy_aggregate = VarianceAggregate::min;
  /// Threads used for the initial per-chunk sampling. Results do not depend on it.
  std::size_t workers = 1;
};

std::unique_ptr<Sampler> make_sampler(const SolverConfig& config);

/// Chunk count actually used for `n_tests` tests under `config`.
std::size_t effective_splits(const SolverConfig& config, std::size_t n_tests);

/// Random partition into `n` chunks whose sizes differ by at most one; the
/// larger chunks come first. Throws unless 1 <= n <= |tests|.
std::vector<TestSubset> split(const TestSubset& tests, std::size_t n, Rng& rng);

/// Rng stream ids used by divide and conquer. Chunk c samples with
/// rng.split(kChunkStream + c); merge m, attempt r with
/// rng.split(kMergeStream + 64 * m + r).
namespace dc_stream {
constexpr std::uint64_t kSplit = 1;
constexpr std::uint64_t kChunk = 1ULL << 20;
constexpr std::uint64_t kMerge = 1ULL << 40;
constexpr std::uint64_t kRestart = 1ULL << 50;
}  // namespace dc_stream

struct DcStats {
  std::size_t merges = 0;
  std::size_t merge_retries = 0;
  std::size_t merge_fallbacks = 0;
  bool timed_out = false;
  /// When set, every sub-instance pushed to the queue is copied to `history`.
  bool keep_history = false;
  std::vector<SubInstance> history;
};

/// Divide and conquer over `scope` (the sub-instance whose summed performance
/// is the reference). Chunks are sampled independently, then merged pairwise
/// in FIFO order; each merge is re-validated against the union of the two
/// chunk contexts. Returns a set feasible for `scope`.
TestSubset divide_and_conquer(const RtsmInstance& instance, const TestSubset& scope,
                              const SolverConfig& config, const Sampler& sampler, Rng rng,
                              DcStats* stats = nullptr);

/// Divide and conquer over the whole instance.
Solution divide_and_conquer(const RtsmInstance& instance, const SolverConfig& config);

/// Divide and conquer, then restart on the previous solution's tests while the
/// cost strictly drops. The result is re-validated on the full instance.
Solution iterative_solve(const RtsmInstance& instance, const SolverConfig& config,
                         ProgressLog* progress = nullptr);

}  // namespace biss
