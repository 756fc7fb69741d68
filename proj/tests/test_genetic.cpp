#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "rghl/errors.hpp"
#include "rghl/genetic.hpp"
#include "rghl/optimizer.hpp"

using namespace rghl;

namespace {

std::vector<Individual> ranked_population(std::size_t n) {
  std::vector<Individual> pop;
  for (std::size_t i = 0; i < n; ++i) {
    pop.push_back({Chromosome{{static_cast<std::uint32_t>(i)}},
                   static_cast<double>(n - i)});
  }
  return pop;
}

}  // namespace

TEST_CASE("fit_slope on collinear points") {
  const std::vector<double> y{1, 2, 3};
  const auto fit = fit_slope(y, 10);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fit_slope on constant scores is flat") {
  const std::vector<double> y{0.7, 0.7, 0.7, 0.7};
  CHECK(fit_slope(y, 4).slope == doctest::Approx(0.0));
}

TEST_CASE("fit_slope matches brute-force SSE minimization") {
  const std::vector<double> y{0.9, 0.5, 0.6, 0.2};
  const auto fit = fit_slope(y, 100);
  const auto [b0, b1] = oracle::grid_search_line(y);
  CHECK(std::abs(fit.intercept - b0) < 1e-6);
  CHECK(std::abs(fit.slope - b1) < 1e-6);
  // Hand computation: Sxy = -1/3, Sxx = 5/9.
  CHECK(fit.slope == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.85).epsilon(1e-12));
}

TEST_CASE("fit_slope uses only the most recent window") {
  const std::vector<double> y{100, -50, 1, 2, 3};
  const auto fit = fit_slope(y, 3);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_slope(std::vector<double>{1.0}, 5), InsufficientHistory);
  CHECK_THROWS_AS(fit_slope(y, 1), InsufficientHistory);
}

TEST_CASE("ampf values") {
  CHECK(ampf(0.0, 2.0) == 1.0);
  CHECK(ampf(0.0, 7.5) == 1.0);
  CHECK(std::abs(ampf(1.0, 2.0) - 0.61920292202211755) < 1e-12);
  CHECK(std::abs(ampf(-1.0, 2.0) - ampf(1.0, 2.0)) == 0.0);
  CHECK(std::abs(ampf(1000.0, 2.0) - 0.5) < 1e-6);
  CHECK(ampf(1000.0, 2.0) > 0.5);
  CHECK(ampf(SlopeFit{0.3, 0.25}, AmpfConfig{2.0, 10}) ==
        doctest::Approx(static_cast<double>(oracle::ampf_reference(0.25L, 2.0L))));
}

TEST_CASE("ampf is strictly decreasing in |slope|") {
  Rng rng(3);
  std::uniform_real_distribution<double> slope(-3.0, 3.0);
  std::uniform_real_distribution<double> alpha(1.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = alpha(rng);
    const double s1 = slope(rng);
    const double s2 = slope(rng);
    if (std::abs(s1) < std::abs(s2)) CHECK(ampf(s1, a) > ampf(s2, a));
  }
}

TEST_CASE("ampf config validation") {
  CHECK_THROWS_AS(AmpfConfig({0.5, 10}).validate(), ConfigError);
  CHECK_THROWS_AS(AmpfConfig({2.0, 1}).validate(), ConfigError);
  CHECK_NOTHROW(AmpfConfig({1.0, 2}).validate());
}

TEST_CASE("mutation schedule") {
  ExperienceMemory memory;
  for (int i = 0; i < 5; ++i) memory.store(Chromosome{{0}}, 0.4, Origin::random);
  CHECK(MutationSchedule::adaptive({}).probability(memory) == 1.0);
  CHECK(MutationSchedule::constant(0.5).probability(memory) == 0.5);
  CHECK_THROWS_AS(MutationSchedule::constant(1.5), ConfigError);
}

TEST_CASE("select_parents with two individuals returns both") {
  auto pop = ranked_population(2);
  Rng rng(1);
  std::set<std::uint32_t> firsts;
  for (int i = 0; i < 100; ++i) {
    auto [a, b] = select_parents(pop, SelectionConfig{2}, rng);
    CHECK(a != b);
    firsts.insert(a.genes[0]);
  }
  CHECK(firsts.size() == 2);
}

TEST_CASE("select_parents is uniform over the whole pool") {
  const std::size_t n = 10;
  auto pop = ranked_population(n);
  Rng rng(2024);
  std::vector<double> counts(n, 0.0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    auto [a, b] = select_parents(pop, SelectionConfig{n}, rng);
    REQUIRE(a != b);
    counts[a.genes[0]] += 1;
    counts[b.genes[0]] += 1;
  }
  const double expected = 2.0 * draws / n;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // chi-square(9) upper 0.1% point.
  CHECK(chi2 < 27.877);
}

TEST_CASE("select_parents respects the top-N pool") {
  auto pop = ranked_population(12);
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    auto [a, b] = select_parents(pop, SelectionConfig{2}, rng);
    // Lowest fitness sits at the end of ranked_population.
    CHECK(std::min(a.genes[0], b.genes[0]) == 10);
    CHECK(std::max(a.genes[0], b.genes[0]) == 11);
  }
  CHECK_THROWS_AS(select_parents(ranked_population(1), SelectionConfig{2}, rng),
                  PopulationTooSmall);
}

TEST_CASE("select_parents breaks fitness ties by position") {
  std::vector<Individual> pop{{Chromosome{{0}}, 1.0},
                              {Chromosome{{1}}, 1.0},
                              {Chromosome{{2}}, 1.0}};
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    auto [a, b] = select_parents(pop, SelectionConfig{2}, rng);
    CHECK(std::max(a.genes[0], b.genes[0]) == 1);
  }
}

TEST_CASE("selection pool default is a quartile") {
  CHECK(SelectionConfig::for_population(20).top_n == 5);
  CHECK(SelectionConfig::for_population(4).top_n == 2);
  CHECK(SelectionConfig::for_population(22).top_n == 6);
}

TEST_CASE("crossover at every position swaps the parents") {
  const Chromosome p1{{1, 2, 3, 4}};
  const Chromosome p2{{5, 6, 7, 8}};
  const std::vector<std::size_t> all{0, 1, 2, 3};
  auto [o1, o2] = crossover_at(p1, p2, all);
  CHECK(o1 == p2);
  CHECK(o2 == p1);
}

TEST_CASE("crossover of identical parents is the identity") {
  const Chromosome p{{3, 1, 4, 1, 5}};
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    auto [o1, o2] = multi_crossover(p, p, rng);
    CHECK(o1 == p);
    CHECK(o2 == p);
  }
}

TEST_CASE("multi_crossover preserves position-wise multisets") {
  Rng rng(17);
  std::uniform_int_distribution<std::uint32_t> gene(0, 9);
  for (int trial = 0; trial < 1000; ++trial) {
    Chromosome p1, p2;
    for (int i = 0; i < 7; ++i) {
      p1.genes.push_back(gene(rng));
      p2.genes.push_back(gene(rng));
    }
    auto [o1, o2] = multi_crossover(p1, p2, rng);
    for (int i = 0; i < 7; ++i) {
      std::multiset<std::uint32_t> parents{p1.genes[i], p2.genes[i]};
      std::multiset<std::uint32_t> kids{o1.genes[i], o2.genes[i]};
      REQUIRE(parents == kids);
    }
  }
  CHECK_THROWS_AS(multi_crossover(Chromosome{{1}}, Chromosome{{1, 2}}, rng),
                  LengthMismatch);
}

TEST_CASE("multi_crossover swap count is uniform on 1..n") {
  Rng rng(23);
  const Chromosome p1{{0, 0, 0, 0}};
  const Chromosome p2{{1, 1, 1, 1}};
  std::map<int, int> counts;
  for (int i = 0; i < 8000; ++i) {
    auto [o1, o2] = multi_crossover(p1, p2, rng);
    int swapped = 0;
    for (auto g : o1.genes) swapped += static_cast<int>(g);
    counts[swapped]++;
  }
  CHECK(counts.count(0) == 0);
  for (int m = 1; m <= 4; ++m) CHECK(std::abs(counts[m] - 2000) < 200);
}

TEST_CASE("mutation leaves single-valued dimensions alone") {
  const SearchSpace space({Dimension("a", {Value{"only"}}),
                           Dimension("b", {Value{"only"}}),
                           Dimension("c", {Value{"x"}, Value{"y"}})});
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    auto [o1, o2] = multi_mutate(Chromosome{{0, 0, 1}}, Chromosome{{0, 0, 0}},
                                 space, rng);
    CHECK(o1.genes[0] == 0);
    CHECK(o1.genes[1] == 0);
    CHECK(o2.genes[0] == 0);
    CHECK(o2.genes[1] == 0);
  }
}

TEST_CASE("mutation output stays valid") {
  const SearchSpace space = SearchSpace::from_json(nlohmann::json::parse(R"({
    "dimensions": [{"name":"a","values":[1,2,3]},
                   {"name":"b","values":["p","q"]},
                   {"name":"c","values":[0.1,0.2,0.3,0.4,0.5,0.6,0.7]}]})"));
  Rng rng(6);
  Chromosome a{{2, 1, 6}};
  Chromosome b{{0, 0, 0}};
  for (int i = 0; i < 1000; ++i) {
    std::tie(a, b) = multi_mutate(a, b, space, rng);
    REQUIRE(space.is_valid(a));
    REQUIRE(space.is_valid(b));
  }
}

TEST_CASE("mutation count follows k ~ U{1..n}") {
  // With 256 values a resampled gene changes with probability 255/256, so the
  // mean number of changed genes is (n + 1) / 2 * 255 / 256.
  const std::size_t n = 8;
  const auto space = SearchSpace::uniform_grid(n, 256);
  Rng rng(99);
  const int trials = 10000;
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    Chromosome c{std::vector<std::uint32_t>(n, 0)};
    Chromosome before = c;
    mutate_in_place(c, space, rng);
    for (std::size_t i = 0; i < n; ++i) total += c.genes[i] != before.genes[i];
  }
  const double expected = (n + 1) / 2.0 * 255.0 / 256.0;
  // sd of k is about 2.29, so the standard error is about 0.023.
  CHECK(std::abs(total / trials - expected) < 0.1);
}

TEST_CASE("choose_positions draws distinct indices") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    auto pos = choose_positions(9, 5, rng);
    std::set<std::size_t> s(pos.begin(), pos.end());
    CHECK(s.size() == 5);
    CHECK(*s.rbegin() < 9);
  }
}

TEST_CASE("rapid step keeps population size") {
  const auto space = SearchSpace::uniform_grid(4, 6);
  Rng rng(31);
  std::vector<Individual> pop;
  ExperienceMemory memory;
  for (int i = 0; i < 10; ++i) {
    auto c = random_chromosome(space, rng);
    const double f = static_cast<double>(i);
    memory.store(c, f, Origin::random);
    pop.push_back({c, f});
  }
  RapidStepConfig cfg{SelectionConfig::for_population(10),
                      MutationSchedule::adaptive({})};
  CHECK(rapid_ga_step(pop, memory, space, cfg, rng).offspring.size() == 10);
  CHECK(rapid_ga_step(pop, memory, space, cfg, 7, rng).offspring.size() == 7);
  for (auto& c : rapid_ga_step(pop, memory, space, cfg, rng).offspring) {
    CHECK(space.is_valid(c));
  }
}

TEST_CASE("rapid step with zero mutation probability only recombines") {
  const auto space = SearchSpace::uniform_grid(5, 50);
  Rng rng(41);
  std::vector<Individual> pop;
  ExperienceMemory memory;
  for (int i = 0; i < 8; ++i) {
    auto c = random_chromosome(space, rng);
    memory.store(c, i * 0.1, Origin::random);
    pop.push_back({c, i * 0.1});
  }
  RapidStepConfig cfg{SelectionConfig{8}, MutationSchedule::constant(0.0)};
  for (int round = 0; round < 100; ++round) {
    auto step = rapid_ga_step(pop, memory, space, cfg, rng);
    CHECK(step.mutated_pairs == 0);
    for (std::size_t k = 0; k + 1 < step.offspring.size(); k += 2) {
      const auto& o1 = step.offspring[k];
      const auto& o2 = step.offspring[k + 1];
      // Each pair is a crossover of two population members.
      bool found = false;
      for (const auto& a : pop) {
        for (const auto& b : pop) {
          if (&a == &b) continue;
          bool ok = true;
          for (std::size_t i = 0; i < 5 && ok; ++i) {
            std::multiset<std::uint32_t> p{a.chromosome.genes[i],
                                           b.chromosome.genes[i]};
            std::multiset<std::uint32_t> o{o1.genes[i], o2.genes[i]};
            ok = p == o;
          }
          found = found || ok;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("flat fitness history mutates every pair") {
  const auto space = SearchSpace::uniform_grid(3, 4);
  Rng rng(53);
  std::vector<Individual> pop;
  ExperienceMemory memory;
  for (int i = 0; i < 4; ++i) {
    auto c = random_chromosome(space, rng);
    memory.store(c, 2.5, Origin::random);
    pop.push_back({c, 2.5});
  }
  RapidStepConfig cfg{SelectionConfig{4}, MutationSchedule::adaptive({})};
  std::size_t pairs = 0;
  std::size_t mutated = 0;
  for (int i = 0; i < 500; ++i) {
    auto step = rapid_ga_step(pop, memory, space, cfg, rng);
    pairs += step.mutation_probabilities.size();
    mutated += step.mutated_pairs;
    for (double d : step.mutation_probabilities) CHECK(d == 1.0);
  }
  CHECK(pairs == 1000);
  CHECK(static_cast<double>(mutated) / pairs == doctest::Approx(1.0));
}
