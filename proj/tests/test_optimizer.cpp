#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "rghl/errors.hpp"
#include "rghl/optimizer.hpp"

using namespace rghl;

namespace {

ObjectiveFunction gene_sum(std::size_t budget) {
  return ObjectiveFunction(
      [](const Chromosome& c, std::size_t) {
        return std::accumulate(c.genes.begin(), c.genes.end(), 0.0);
      },
      budget);
}

RghlConfig small_config(std::uint64_t seed) {
  auto cfg = RghlConfig::defaults_for(20);
  cfg.generations = 14;
  cfg.seed = seed;
  return cfg;
}

bool same_records(const RunResult& a, const RunResult& b) {
  if (a.memory.size() != b.memory.size()) return false;
  for (std::size_t i = 0; i < a.memory.size(); ++i) {
    const auto& x = a.memory[i];
    const auto& y = b.memory[i];
    if (x.chromosome != y.chromosome || x.fitness != y.fitness ||
        x.origin != y.origin) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("objective budget is enforced") {
  auto f = gene_sum(2);
  f.evaluate(Chromosome{{1}});
  f.evaluate(Chromosome{{2}});
  CHECK(f.eval_count() == 2);
  CHECK(f.remaining() == 0);
  CHECK_THROWS_AS(f.evaluate(Chromosome{{3}}), BudgetExhausted);
  CHECK(f.eval_count() == 2);
}

TEST_CASE("RGHL config defaults and validation") {
  const auto cfg = RghlConfig::defaults_for(20);
  CHECK(cfg.exploit_count == 10);
  CHECK(cfg.rhc.seeds == 10);
  CHECK(cfg.ampf.window == 40);
  CHECK(cfg.ampf.alpha == 2.0);
  CHECK(cfg.selection.top_n == 5);
  CHECK_NOTHROW(cfg.validate());

  auto bad = cfg;
  bad.population = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.exploit_count = 20;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.exploit_count = 0;
  CHECK_THROWS_AS(bad.validate(true), ConfigError);
  CHECK_NOTHROW(bad.validate(false));
  bad = cfg;
  bad.selection.top_n = 21;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero generations is random search over the population") {
  const auto space = SearchSpace::uniform_grid(4, 8);
  auto cfg = small_config(3);
  cfg.generations = 0;
  auto f = gene_sum(1000);
  const auto res = run_rghl(f, space, cfg);
  REQUIRE(res.trace.size() == 20);
  double best = 1e300;
  for (const auto& r : res.memory.records()) {
    CHECK(r.origin == Origin::random);
    best = std::min(best, r.fitness);
  }
  CHECK(res.best_fitness == best);
  CHECK_FALSE(res.truncated);
}

TEST_CASE("each generation splits genetic and surrogate evaluations") {
  const auto space = SearchSpace::uniform_grid(9, 16);
  auto cfg = small_config(11);
  auto f = gene_sum(300);
  const auto res = run_rghl(f, space, cfg);
  REQUIRE(res.trace.size() == 300);
  CHECK(res.generations_completed == 14);
  CHECK_FALSE(res.truncated);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(res.trace.rows[i].origin == Origin::random);
  }
  for (std::size_t g = 0; g < 14; ++g) {
    const std::size_t base = 20 + g * 20;
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(res.trace.rows[base + i].origin == Origin::genetic);
      CHECK(res.trace.rows[base + 10 + i].origin == Origin::surrogate);
    }
  }
}

TEST_CASE("budget exhaustion truncates cleanly") {
  const auto space = SearchSpace::uniform_grid(3, 8);
  auto cfg = small_config(5);
  auto f = gene_sum(55);
  const auto res = run_rghl(f, space, cfg);
  CHECK(res.truncated);
  CHECK(res.trace.size() == 55);
  CHECK(res.generations_completed == 1);
  // Best is the minimum over everything evaluated.
  double best = 1e300;
  for (const auto& r : res.memory.records()) best = std::min(best, r.fitness);
  CHECK(res.best_fitness == best);
}

TEST_CASE("runs are reproducible") {
  const auto space = SearchSpace::uniform_grid(6, 10);
  auto f1 = gene_sum(300);
  auto f2 = gene_sum(300);
  const auto a = run_rghl(f1, space, small_config(42));
  const auto b = run_rghl(f2, space, small_config(42));
  CHECK(same_records(a, b));
  auto f3 = gene_sum(300);
  const auto c = run_rghl(f3, space, small_config(43));
  CHECK_FALSE(same_records(a, c));
}

TEST_CASE("best individual is the earliest of the lowest fitness") {
  const auto space = SearchSpace::uniform_grid(2, 3);
  ObjectiveFunction f([](const Chromosome&, std::size_t) { return 1.0; }, 50);
  const auto res = run_random_search(f, space, 50, 4);
  CHECK(res.best == res.memory[0].chromosome);
}

TEST_CASE("random search basics") {
  const auto space = SearchSpace::uniform_grid(3, 5);
  auto f1 = gene_sum(1);
  const auto one = run_random_search(f1, space, 1, 9);
  REQUIRE(one.trace.size() == 1);
  CHECK(one.best_fitness == one.memory[0].fitness);
  auto f2 = gene_sum(37);
  const auto many = run_random_search(f2, space, 37, 9);
  CHECK(many.trace.size() == 37);
  for (std::size_t i = 1; i < many.trace.size(); ++i) {
    CHECK(many.trace.rows[i].best_so_far <= many.trace.rows[i - 1].best_so_far);
  }
}

TEST_CASE("random search hit rate matches 1 - (1 - p)^budget") {
  const auto space = SearchSpace::uniform_grid(1, 8);
  const std::size_t budget = 5;
  const int runs = 4000;
  int hits = 0;
  for (int r = 0; r < runs; ++r) {
    ObjectiveFunction f(
        [](const Chromosome& c, std::size_t) { return c.genes[0] == 3 ? 0.0 : 1.0; },
        budget);
    hits += run_random_search(f, space, budget, 1000 + r).best_fitness == 0.0;
  }
  const double expected = 1.0 - std::pow(7.0 / 8.0, 5.0);
  // Binomial standard error is about 0.008.
  CHECK(std::abs(static_cast<double>(hits) / runs - expected) < 0.035);
}

TEST_CASE("crossover-only GA never leaves the initial gene pool") {
  const auto space = SearchSpace::uniform_grid(5, 16);
  auto f = gene_sum(300);
  const auto res = run_ga_eg(f, space, small_config(8), 0.0);
  CHECK(res.mutated_pairs == 0);
  std::vector<std::set<std::uint32_t>> pool(5);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t g = 0; g < 5; ++g) pool[g].insert(res.memory[i].chromosome.genes[g]);
  }
  for (const auto& r : res.memory.records()) {
    for (std::size_t g = 0; g < 5; ++g) CHECK(pool[g].count(r.chromosome.genes[g]));
  }
}

TEST_CASE("GA with epsilon one mutates every pair") {
  const auto space = SearchSpace::uniform_grid(5, 16);
  auto f = gene_sum(300);
  const auto res = run_ga_eg(f, space, small_config(8), 1.0);
  CHECK(res.mutation_probabilities.size() == 14 * 10);
  CHECK(res.mutated_pairs == res.mutation_probabilities.size());
}

TEST_CASE("GA with epsilon one half fills a 300 evaluation trace") {
  const auto space = SearchSpace::uniform_grid(9, 16);
  auto f = gene_sum(300);
  const auto res = run_ga_eg(f, space, small_config(10), 0.5);
  REQUIRE(res.trace.size() == 300);
  for (std::size_t i = 0; i < 300; ++i) {
    CHECK(res.trace.rows[i].eval_index == i);
    CHECK(res.trace.rows[i].origin != Origin::surrogate);
    if (i > 0) CHECK(res.trace.rows[i].best_so_far <= res.trace.rows[i - 1].best_so_far);
  }
  for (double d : res.mutation_probabilities) CHECK(d == 0.5);
}

TEST_CASE("rapid GA is the generational loop without exploitation") {
  const auto space = SearchSpace::uniform_grid(6, 12);
  const auto cfg = small_config(21);
  auto f1 = gene_sum(300);
  auto f2 = gene_sum(300);
  const auto a = run_rapid_ga(f1, space, cfg);
  const auto b = run_population_search(f2, space, cfg, 0,
                                       MutationSchedule::adaptive(cfg.ampf), "x");
  CHECK(same_records(a, b));
  for (const auto& r : a.memory.records()) CHECK(r.origin != Origin::surrogate);
  REQUIRE_FALSE(a.mutation_probabilities.empty());
  for (double d : a.mutation_probabilities) {
    CHECK(d > 0.5);
    CHECK(d <= 1.0);
  }
}

TEST_CASE("RGHL beats random search on a separable objective") {
  const auto space = SearchSpace::uniform_grid(9, 16);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto f1 = gene_sum(300);
    auto f2 = gene_sum(300);
    const auto rghl = run_rghl(f1, space, small_config(seed));
    const auto rs = run_random_search(f2, space, 300, seed);
    wins += rghl.best_fitness <= rs.best_fitness;
  }
  CHECK(wins >= 24);
}
