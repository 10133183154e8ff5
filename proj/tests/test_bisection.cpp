#include <doctest.h>

#include <map>

#include "biss/bisection.hpp"
#include "biss/error.hpp"
#include "support.hpp"

using namespace biss;
using namespace biss::testing;

TEST_CASE("split_half") {
  Rng rng(1);
  SUBCASE("singleton") {
    auto [a, b] = split_half({7}, rng);
    CHECK(a.empty());
    CHECK(b == TestSubset{7});
  }
  SUBCASE("six") {
    auto [a, b] = split_half({0, 1, 2, 3, 4, 5}, rng);
    CHECK(a.size() == 3);
    CHECK(b.size() == 3);
    CHECK(canonical(set_union(a, b)) == TestSubset{0, 1, 2, 3, 4, 5});
    CHECK(set_difference(a, b) == a);
  }
  SUBCASE("replay") {
    Rng r1(99), r2(99);
    TestSubset s{2, 3, 5, 7, 11, 13, 17};
    CHECK(split_half(s, r1) == split_half(s, r2));
  }
  SUBCASE("every split shows up") {
    // 4 choose 2 = 6 possible first halves, each roughly 1/6 of the time
    std::map<TestSubset, int> seen;
    for (int i = 0; i < 6000; ++i) ++seen[split_half({0, 1, 2, 3}, rng).first];
    CHECK(seen.size() == 6);
    for (auto& [k, v] : seen) CHECK(v > 800);
  }
}

TEST_CASE("find_necessary agrees with brute-force single removals") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t nv = 3 + seed % 5;
    const std::size_t nt = 4 + seed % 7;
    auto inst = random_instance(nv, nt, 500 + seed);
    FeasibilityOracle oracle(inst, all_tests(nt));
    auto p = find_necessary(all_tests(nt), {}, oracle, SearchBudget::unlimited(0));
    CHECK_FALSE(p.partial);
    TestSubset expected;
    for (std::size_t t = 0; t < nt; ++t)
      if (!reference_feasible(inst, without(all_tests(nt), t), all_tests(nt), 1.0)) expected.push_back(t);
    CHECK(p.necessary == expected);
    CHECK(canonical(set_union(p.necessary, p.removable)) == all_tests(nt));
    CHECK(set_difference(p.necessary, p.removable) == p.necessary);
    // soundness on replay
    for (auto t : p.necessary) CHECK_FALSE(oracle.evaluate(without(all_tests(nt), t)).feasible);
  }
}

TEST_CASE("find_necessary marks every test of an all-necessary matrix") {
  // Search for a 3x3 integer matrix where the brute-force check finds every
  // single removal infeasible, then compare.
  Rng rng(2024);
  int found = 0;
  for (int attempt = 0; attempt < 5000 && found < 5; ++attempt) {
    std::vector<std::vector<double>> rows(3, std::vector<double>(3));
    for (auto& r : rows)
      for (auto& x : r) x = static_cast<double>(rng.below(9));
    auto inst = instance_of(rows);
    bool all_needed = true;
    for (std::size_t t = 0; t < 3 && all_needed; ++t)
      all_needed = !reference_feasible(inst, without(all_tests(3), t), all_tests(3), 1.0);
    if (!all_needed) continue;
    ++found;
    FeasibilityOracle oracle(inst, all_tests(3));
    auto p = find_necessary(all_tests(3), {}, oracle, SearchBudget::unlimited(0));
    CHECK(p.necessary == all_tests(3));
    CHECK(p.removable.empty());
  }
  CHECK(found == 5);
}

TEST_CASE("find_necessary with a duplicated column") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto base = random_instance(5, 4, 900 + seed);
    std::vector<std::vector<double>> rows(5);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t t = 0; t < 4; ++t) rows[i].push_back(base.matrix(0)(i, t));
      rows[i].push_back(base.matrix(0)(i, 0));  // copy of column 0
    }
    auto inst = instance_of(rows);
    FeasibilityOracle oracle(inst, all_tests(5));
    auto p = find_necessary(all_tests(5), {}, oracle, SearchBudget::unlimited(0));
    const bool c0 = contains(p.necessary, 0), c4 = contains(p.necessary, 4);
    CHECK_FALSE((c0 && c4));
    CHECK(reference_feasible(inst, without(all_tests(5), 0), all_tests(5), 1.0));
    CHECK(reference_feasible(inst, without(all_tests(5), 4), all_tests(5), 1.0));
  }
}

TEST_CASE("find_necessary edge cases") {
  auto inst = random_instance(4, 5, 3);
  FeasibilityOracle oracle(inst, all_tests(5));
  auto p = find_necessary({}, {0, 1, 2, 3, 4}, oracle, SearchBudget::unlimited(0));
  CHECK(p.necessary == all_tests(5));
  CHECK(p.removable.empty());

  SearchBudget expired;
  expired.deadline = SearchBudget::Clock::now() - std::chrono::seconds(1);
  auto q = find_necessary({0, 1, 2, 3, 4}, {}, oracle, expired);
  CHECK(q.partial);
  CHECK(canonical(set_union(q.necessary, q.removable)) == all_tests(5));
}

TEST_CASE("bisection_sample basics") {
  auto inst = random_instance(5, 8, 12);
  SUBCASE("empty removable returns the necessary set") {
    auto s = bisection_sample({}, all_tests(8), all_tests(8), inst, SearchBudget::unlimited(1));
    CHECK(s.tests == all_tests(8));
    CHECK(s.feasible);
    CHECK(s.weights[0] == std::vector<double>(8, 1.0));
    CHECK(s.method == "biss");
  }
  SUBCASE("overlapping or out-of-context inputs") {
    CHECK_THROWS_AS(bisection_sample({0, 1}, {1, 2}, all_tests(8), inst, SearchBudget::unlimited(1)), Error);
    CHECK_THROWS_AS(bisection_sample({0, 1}, {2}, {0, 1}, inst, SearchBudget::unlimited(1)), Error);
  }
  SUBCASE("expired budget still yields a feasible answer") {
    SearchBudget expired;
    expired.deadline = SearchBudget::Clock::now() - std::chrono::seconds(1);
    auto s = bisection_sample(all_tests(8), {}, all_tests(8), inst, expired);
    CHECK(s.feasible);
    CHECK(s.total_cost <= 8.0);
  }
}

TEST_CASE("bisection_sample on rank-1 data keeps a single test") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(6), b(10);
    for (auto& x : a) x = 1.0 + rng.uniform();
    for (auto& x : b) x = 1.0 + rng.uniform();
    std::vector<std::vector<double>> rows(6, std::vector<double>(10));
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 10; ++j) rows[i][j] = a[i] * b[j];
    auto inst = instance_of(rows);
    // any single column suffices
    for (std::size_t t = 0; t < 10; ++t) CHECK(reference_feasible(inst, {t}, all_tests(10), 1.0));
    auto s = bisection_sample(all_tests(10), {}, all_tests(10), inst, SearchBudget::unlimited(trial));
    CHECK(s.tests.size() == 1);
    CHECK(s.feasible);
  }
}

TEST_CASE("bisection_sample never beats the exhaustive optimum") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto inst = random_instance(4, 12, 700 + seed);
    const double opt = exhaustive_min_cost(inst, 1.0);
    for (std::uint64_t s = 0; s < 3; ++s) {
      auto sol = bisection_sample(all_tests(12), {}, all_tests(12), inst, SearchBudget::unlimited(s));
      CHECK(sol.feasible);
      CHECK(reference_feasible(inst, sol.tests, all_tests(12), 1.0));
      CHECK(sol.total_cost >= opt);
      CHECK(sol.total_cost <= 12.0);
    }
  }
}

TEST_CASE("bisection_sample is seed-deterministic and valid in sub-contexts") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = random_instance(6, 16, 800 + seed, seed % 2 ? 1.0 : 0.7);
    const TestSubset ctx{0, 2, 3, 5, 8, 9, 11, 12, 15};
    auto a = bisection_sample(ctx, {}, ctx, inst, SearchBudget::unlimited(seed));
    auto b = bisection_sample(ctx, {}, ctx, inst, SearchBudget::unlimited(seed));
    CHECK(a.tests == b.tests);
    CHECK(a.weights == b.weights);
    CHECK(is_subset(a.tests, ctx));
    CHECK(solves_in_context(ctx, a.tests, inst).feasible);
    CHECK(reference_feasible(inst, a.tests, ctx, inst.target_tau()));
  }
}

TEST_CASE("preferable breaks cost ties by test ids") {
  auto inst = instance_of({{1, 2, 3}, {3, 2, 1}}, 1.0, {1, 1, 2});
  CHECK(preferable({0}, {2}, inst));
  CHECK(preferable({0, 1}, {2}, inst));  // equal cost, "t0" < "t2"
  CHECK_FALSE(preferable({2}, {0, 1}, inst));
  CHECK_FALSE(preferable({2}, {2}, inst));
  CHECK(preferable({0, 1}, {0, 2}, inst));
}

TEST_CASE("ProgressLog only records improvements") {
  ProgressLog log;
  for (double c : {10.0, 12.0, 8.0, 8.0, 9.0, 3.0}) log.offer(c);
  auto e = log.entries();
  REQUIRE(e.size() == 3);
  for (std::size_t i = 1; i < e.size(); ++i) {
    CHECK(e[i].cost < e[i - 1].cost);
    CHECK(e[i].seconds >= e[i - 1].seconds);
  }
  CHECK(*log.best() == 3.0);
  CHECK_THROWS_AS(SearchBudget::for_seconds(0.0, 1), Error);
}
