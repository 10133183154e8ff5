#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "biss/error.hpp"
#include "biss/exact.hpp"
#include "support.hpp"

using namespace biss;
using namespace biss::testing;

TEST_CASE("exact on the two-variant example") {
  auto inst = instance_of({{3, 1, 1}, {1, 1, 2}});
  // enumerate all 7 subsets by hand: only those with test 0 keep 0 above 1
  CHECK(exhaustive_unit_min_cost(inst) == 1.0);
  auto s = exact_minimize(inst);
  CHECK(s.tests == TestSubset{0});
  CHECK(s.total_cost == 1.0);
  CHECK(s.weights[0] == std::vector<double>{1.0});
  CHECK(s.achieved_tau == 1.0);
  CHECK(s.method == "exact");
}

TEST_CASE("exact on duplicates keeps one test") {
  auto inst = instance_of({{0.3, 0.3, 0.3, 0.3}, {0.9, 0.9, 0.9, 0.9}, {0.1, 0.1, 0.1, 0.1}});
  CHECK(exact_minimize(inst).tests.size() == 1);
}

TEST_CASE("exact equals the exhaustive unit-weight optimum") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::size_t nt = 4 + i % 11;  // up to 14 tests
    auto base = random_instance(3 + i % 5, nt, 4000 + i, 1.0, i % 3 == 0);
    std::vector<double> costs(nt);
    Rng rng(i);
    for (auto& c : costs) c = static_cast<double>(1 + rng.below(5));
    RtsmInstance inst({base.matrix(0)}, CostVector(costs), 1.0);
    auto s = exact_minimize(inst);
    CHECK(s.total_cost == exhaustive_unit_min_cost(inst));
    CHECK(unit_weights_preserve_ranking(inst, s.tests));
    // branch and bound agrees with enumeration
    ExactOptions bb;
    bb.exhaustive_limit = 0;
    CHECK(exact_minimize(inst, bb).total_cost == s.total_cost);
  }
}

TEST_CASE("exact with two metrics") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto a = random_instance(5, 9, 4100 + i, 1.0, true);
    auto b = random_instance(5, 9, 4200 + i, 1.0, true);
    RtsmInstance inst({a.matrix(0), PerformanceMatrix(a.variant_ids(), a.test_ids(), b.matrix(0).values(), "m2")},
                      CostVector::unit(9), 1.0);
    CHECK(exact_minimize(inst).total_cost == exhaustive_unit_min_cost(inst));
  }
}

TEST_CASE("exact model shape and errors") {
  auto inst = random_instance(5, 6, 1);
  auto model = ExactModel::build(inst);
  CHECK(model.constraints.size() == 2 * 10);
  CHECK(model.distinct_constraints() == 10);
  CHECK(model.n_tests == 6);

  CHECK_THROWS_WITH_AS(exact_minimize(inst.with_target(0.99)), "exact backend supports tau = 1 only", Error);
  auto big = random_instance(3, 70, 2);
  CHECK_THROWS_WITH_AS(exact_minimize(big), doctest::Contains("at most 64"), Error);
}

TEST_CASE("LP export and solution import") {
  auto inst = instance_of({{3, 1, 1}, {1, 1, 2}});
  auto model = ExactModel::build(inst);
  std::ostringstream lp;
  write_lp(model, lp);
  const auto text = lp.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Binary") != std::string::npos);
  CHECK(text.find("u0") != std::string::npos);
  CHECK(text.find("u2") != std::string::npos);

  std::istringstream sol("Optimal - objective value 1\n      0 u0  1  1\n      1 u1  0  0\n      2 u2  0  0\n");
  CHECK(read_lp_solution(sol, 3) == TestSubset{0});
  std::istringstream glpk("u0 1\nu2 0.9999\n");
  CHECK(read_lp_solution(glpk, 3) == TestSubset{0, 2});
}

TEST_CASE("external backend through a command") {
  auto dir = std::filesystem::temp_directory_path() / "biss_exact_test";
  std::filesystem::create_directories(dir);
  auto inst = instance_of({{3, 1, 1}, {1, 1, 2}});
  ExactOptions opts;
  opts.backend = ExactBackendKind::external;
  opts.work_dir = dir.string();
  opts.external_command = "printf 'u0 1\\nu1 0\\nu2 0\\n' > {solution}";
  auto s = exact_minimize(inst, opts);
  CHECK(s.tests == TestSubset{0});
  opts.external_command = "printf 'u2 1\\n' > {solution}";
  CHECK_THROWS_WITH_AS(exact_minimize(inst, opts), doctest::Contains("does not preserve"), Error);
  opts.external_command = "false";
  CHECK_THROWS_AS(exact_minimize(inst, opts), Error);
  std::filesystem::remove_all(dir);
}
