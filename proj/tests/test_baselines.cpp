#include <doctest.h>

#include "biss/baselines.hpp"
#include "biss/error.hpp"
#include "support.hpp"

using namespace biss;
using namespace biss::testing;

namespace {

RtsmInstance copies_of_one_column(std::size_t variants, std::size_t copies, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> base(variants);
  for (auto& x : base) x = rng.uniform();
  std::vector<std::vector<double>> rows(variants, std::vector<double>(copies));
  for (std::size_t i = 0; i < variants; ++i)
    for (auto& x : rows[i]) x = base[i];
  return instance_of(rows);
}

double sample_variance(const PerformanceMatrix& m, std::size_t t) {
  double mean = 0.0;
  for (std::size_t i = 0; i < m.n_variants(); ++i) mean += m(i, t);
  mean /= static_cast<double>(m.n_variants());
  double ss = 0.0;
  for (std::size_t i = 0; i < m.n_variants(); ++i) ss += (m(i, t) - mean) * (m(i, t) - mean);
  return ss;
}

}  // namespace

TEST_CASE("random_search_step") {
  SUBCASE("a single test cannot shrink") {
    auto inst = random_instance(4, 5, 1);
    // find a feasible singleton, if there is none use the full set
    Rng rng(3);
    auto s = random_search_step(all_tests(5), inst, rng, SearchBudget::unlimited(3));
    CHECK(s.feasible);
    if (s.tests.size() == 1) {
      Rng again(4);
      auto t = random_search_step(s.tests, inst, again, SearchBudget::unlimited(4));
      CHECK(t.tests == s.tests);
    }
  }
  SUBCASE("eight copies shrink to one") {
    auto inst = copies_of_one_column(5, 8, 2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed);
      auto s = random_search_step(all_tests(8), inst, rng, SearchBudget::unlimited(seed));
      CHECK(s.tests.size() == 1);
      CHECK(reference_feasible(inst, s.tests, all_tests(8), 1.0));
    }
    SearchBudget tight;
    tight.deadline = SearchBudget::Clock::now();
    Rng rng(1);
    auto s = random_search_step(all_tests(8), inst, rng, tight);
    CHECK(s.feasible);
  }
  SUBCASE("replay") {
    auto inst = random_instance(5, 12, 21);
    Rng a(6), b(6);
    auto x = random_search_step(all_tests(12), inst, a, SearchBudget::unlimited(6));
    auto y = random_search_step(all_tests(12), inst, b, SearchBudget::unlimited(6));
    CHECK(x.tests == y.tests);
  }
  SUBCASE("infeasible start") {
    auto inst = instance_of({{1, 0}, {0, 2}});
    Rng rng(1);
    CHECK_THROWS_AS(random_search_step({0}, inst, rng, SearchBudget::unlimited(1)), Error);
  }
}

TEST_CASE("variance_priority") {
  auto inst = instance_of({{1, 5, 2, 7}, {3, 5, 0, 7}, {2, 5, 9, 7}});
  auto p = variance_priority(inst);
  const auto& m = inst.matrix(0);
  // standardized by the mean column variance, so ratios match raw variances
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      if (sample_variance(m, a) < sample_variance(m, b)) CHECK(p[a] < p[b]);
  CHECK(p[1] == 0.0);
  CHECK(p[3] == 0.0);

  // min versus mean over two metrics
  auto m0 = matrix_of({{0, 1}, {2, 1}, {4, 1}}, "a");
  auto m1 = matrix_of({{1, 0}, {1, 3}, {1, 6}}, "b");
  RtsmInstance two({m0, m1}, CostVector::unit(2), 1.0);
  auto pmin = variance_priority(two, VarianceAggregate::min);
  auto pmean = variance_priority(two, VarianceAggregate::mean);
  CHECK(pmin[0] == 0.0);
  CHECK(pmin[1] == 0.0);
  CHECK(pmean[0] == doctest::Approx(1.0));
  CHECK(pmean[1] == doctest::Approx(1.0));
}

TEST_CASE("greedy removes a redundant constant column") {
  // column 2 is constant; there is no intercept, so it is redundant only
  // because the other columns already order the variants
  auto inst = instance_of({{1, 2.5, 3}, {2, 4, 3}, {4, 8.5, 3}, {3, 6, 3}});
  auto p = variance_priority(inst);
  CHECK(p[2] == 0.0);
  CHECK(p[2] < p[0]);
  CHECK(p[2] < p[1]);
  CHECK(reference_feasible(inst, {0, 1}, all_tests(3), 1.0));
  auto s = greedy_minimize(inst, SearchBudget::unlimited(0));
  CHECK_FALSE(contains(s.tests, 2));
  CHECK(s.feasible);
}

TEST_CASE("greedy keeps a low-variance column that is necessary") {
  // Search generic instances for one whose lowest-priority column is
  // necessary by the brute-force check; greedy must keep it.
  Rng rng(55);
  int found = 0;
  for (int attempt = 0; attempt < 20000 && found < 5; ++attempt) {
    std::vector<std::vector<double>> rows(5, std::vector<double>(4));
    for (auto& r : rows)
      for (auto& x : r) x = rng.uniform();
    auto inst = instance_of(rows);
    auto p = variance_priority(inst);
    std::size_t low = 0;
    for (std::size_t t = 1; t < 4; ++t)
      if (p[t] < p[low]) low = t;
    bool unique = true;
    for (std::size_t t = 0; t < 4; ++t)
      if (t != low && p[t] == p[low]) unique = false;
    if (!unique || p[low] == 0.0) continue;
    if (reference_feasible(inst, without(all_tests(4), low), all_tests(4), 1.0)) continue;
    ++found;
    auto s = greedy_minimize(inst, SearchBudget::unlimited(0));
    CHECK(contains(s.tests, low));
    CHECK(s.feasible);
  }
  CHECK(found == 5);
}

TEST_CASE("greedy is deterministic and feasible on random instances") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto inst = random_instance(3 + i % 5, 8 + i, 2000 + i);
    auto a = greedy_minimize(inst, SearchBudget::unlimited(1));
    auto b = greedy_minimize(inst, SearchBudget::unlimited(99));
    CHECK(a.tests == b.tests);
    CHECK(reference_feasible(inst, a.tests, all_tests(inst.n_tests()), 1.0));
    CHECK(a.total_cost <= inst.costs().total());
  }
}

TEST_CASE("principal loadings of rank-1 data plus an orthogonal column") {
  // variants u, test scales b; the extra column is centred and orthogonal to
  // the centred u, so its loading on the first direction is zero
  const std::vector<double> u{1.0, 2.0, 4.0, 7.0};
  const std::vector<double> b{1.0, 3.0, 0.5};
  const std::vector<double> noise{2e-3, -3e-3, 1e-3, 0.0};  // centred
  double dot = 0.0;
  for (std::size_t i = 0; i < 4; ++i) dot += (u[i] - 3.5) * noise[i];
  REQUIRE(dot == doctest::Approx(0.0));
  std::vector<std::vector<double>> rows(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (double s : b) rows[i].push_back(u[i] * s);
    rows[i].push_back(noise[i]);
  }
  auto inst = instance_of(rows);
  auto l = principal_loadings(inst, all_tests(4));
  REQUIRE(l.size() == 4);
  CHECK(l[3] == doctest::Approx(0.0).epsilon(1e-9));
  for (std::size_t t = 0; t < 3; ++t) CHECK(l[t] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
  auto s = pca_minimize(inst, SearchBudget::unlimited(0));
  CHECK_FALSE(contains(s.tests, 3));
  CHECK(s.feasible);
}

TEST_CASE("pca removes duplicates and falls back on flat data") {
  auto dup = copies_of_one_column(6, 5, 9);
  auto s = pca_minimize(dup, SearchBudget::unlimited(0));
  CHECK(s.tests.size() < 5);
  CHECK(reference_feasible(dup, s.tests, all_tests(5), 1.0));

  auto flat = instance_of({{2, 2, 2}, {2, 2, 2}, {2, 2, 2}});
  CHECK(principal_loadings(flat, all_tests(3)).empty());
  auto f = pca_minimize(flat, SearchBudget::unlimited(0));
  CHECK(f.feasible);
  CHECK(f.tests.size() == 1);
}

TEST_CASE("every baseline output is feasible and no costlier than everything") {
  for (std::uint64_t i = 0; i < 8; ++i) {
    auto inst = random_instance(4 + i % 4, 10 + i, 3100 + i, i % 2 ? 1.0 : 0.8);
    const auto every = all_tests(inst.n_tests());
    const double target = inst.target_tau();
    Rng rng(i);
    std::vector<Solution> out{random_search_step(every, inst, rng, SearchBudget::unlimited(i)),
                              greedy_minimize(inst, SearchBudget::unlimited(i)),
                              greedy_minimize(inst, SearchBudget::unlimited(i), VarianceAggregate::mean),
                              pca_minimize(inst, SearchBudget::unlimited(i))};
    for (const auto& s : out) {
      CHECK(reference_feasible(inst, s.tests, every, target));
      CHECK(s.total_cost <= inst.costs().total());
    }
  }
}

TEST_CASE("sampler names") {
  CHECK(parse_sampler_kind("pca") == SamplerKind::pca);
  CHECK(to_string(SamplerKind::greedy) == "greedy");
  CHECK_THROWS_WITH_AS(parse_sampler_kind("racing"), doctest::Contains("unknown method"), Error);
}
