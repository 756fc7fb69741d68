#include "rghl/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rghl/errors.hpp"

namespace rghl {

void AmpfConfig::validate() const {
  if (!(alpha >= 1.0)) throw ConfigError("ampf alpha must be >= 1");
  if (window < 2) throw ConfigError("ampf window must be >= 2");
}

SelectionConfig SelectionConfig::for_population(std::size_t population) {
  return SelectionConfig{std::max<std::size_t>(2, (population + 3) / 4)};
}

SlopeFit fit_slope(std::span<const double> scores, std::size_t window) {
  const std::size_t m = std::min(window, scores.size());
  if (m < 2) {
    throw InsufficientHistory("slope fit needs at least two scores");
  }
  auto ys = scores.subspan(scores.size() - m);
  const double step = 1.0 / static_cast<double>(m - 1);

  // Abscissae are i * step, so their mean is exactly 0.5.
  const double x_mean = 0.5;
  const double y_mean =
      std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(m);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = static_cast<double>(i) * step - x_mean;
    sxy += dx * (ys[i] - y_mean);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  return SlopeFit{y_mean - slope * x_mean, slope};
}

double ampf(double slope, double alpha) {
  const double d = 1.5 - 1.0 / (1.0 + std::exp(-alpha * std::abs(slope)));
  // Large |slope| rounds to exactly 0.5; keep the lower bound open.
  return std::max(d, std::nextafter(0.5, 1.0));
}

double ampf(const SlopeFit& fit, const AmpfConfig& cfg) {
  return ampf(fit.slope, cfg.alpha);
}

MutationSchedule MutationSchedule::adaptive(AmpfConfig cfg) {
  cfg.validate();
  MutationSchedule s;
  s.adaptive_ = true;
  s.ampf_ = cfg;
  return s;
}

MutationSchedule MutationSchedule::constant(double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw ConfigError("mutation probability must lie in [0, 1]");
  }
  MutationSchedule s;
  s.adaptive_ = false;
  s.constant_ = probability;
  return s;
}

double MutationSchedule::probability(const ExperienceMemory& memory) const {
  if (!adaptive_) return constant_;
  const auto history = memory.fitness_history();
  return ampf(fit_slope(history, ampf_.window), ampf_);
}

std::pair<Chromosome, Chromosome> select_parents(
    std::span<const Individual> population, const SelectionConfig& cfg,
    Rng& rng) {
  if (population.size() < 2) {
    throw PopulationTooSmall("parent selection needs at least two individuals");
  }
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return population[a].fitness < population[b].fitness;
  });
  const std::size_t pool =
      std::clamp<std::size_t>(cfg.top_n, 2, population.size());

  std::uniform_int_distribution<std::size_t> first(0, pool - 1);
  std::uniform_int_distribution<std::size_t> second(0, pool - 2);
  const std::size_t a = first(rng);
  std::size_t b = second(rng);
  if (b >= a) ++b;
  return {population[order[a]].chromosome, population[order[b]].chromosome};
}

std::vector<std::size_t> choose_positions(std::size_t n, std::size_t count,
                                          Rng& rng) {
  count = std::min(count, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  return idx;
}

std::pair<Chromosome, Chromosome> crossover_at(
    const Chromosome& p1, const Chromosome& p2,
    std::span<const std::size_t> positions) {
  if (p1.size() != p2.size()) {
    throw LengthMismatch("crossover parents differ in length");
  }
  Chromosome o1 = p1;
  Chromosome o2 = p2;
  for (auto i : positions) {
    std::swap(o1.genes.at(i), o2.genes.at(i));
  }
  return {std::move(o1), std::move(o2)};
}

std::pair<Chromosome, Chromosome> multi_crossover(const Chromosome& p1,
                                                  const Chromosome& p2,
                                                  Rng& rng) {
  if (p1.size() != p2.size()) {
    throw LengthMismatch("crossover parents differ in length");
  }
  const std::size_t n = p1.size();
  if (n == 0) return {p1, p2};
  std::uniform_int_distribution<std::size_t> count(1, n);
  const auto positions = choose_positions(n, count(rng), rng);
  return crossover_at(p1, p2, positions);
}

void mutate_in_place(Chromosome& c, const SearchSpace& space, Rng& rng) {
  const std::size_t n = c.size();
  if (n == 0) return;
  std::uniform_int_distribution<std::size_t> count(1, n);
  for (auto i : choose_positions(n, count(rng), rng)) {
    std::uniform_int_distribution<std::uint32_t> gene(
        0, static_cast<std::uint32_t>(space.cardinality(i) - 1));
    c.genes[i] = gene(rng);
  }
}

std::pair<Chromosome, Chromosome> multi_mutate(Chromosome o1, Chromosome o2,
                                               const SearchSpace& space,
                                               Rng& rng) {
  mutate_in_place(o1, space, rng);
  mutate_in_place(o2, space, rng);
  return {std::move(o1), std::move(o2)};
}

RapidStepResult rapid_ga_step(std::span<const Individual> population,
                              const ExperienceMemory& memory,
                              const SearchSpace& space,
                              const RapidStepConfig& cfg,
                              std::size_t offspring_count, Rng& rng) {
  RapidStepResult out;
  out.offspring.reserve(offspring_count + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (out.offspring.size() < offspring_count) {
    auto [p1, p2] = select_parents(population, cfg.selection, rng);
    auto [o1, o2] = multi_crossover(p1, p2, rng);

    const double delta = cfg.mutation.probability(memory);
    out.mutation_probabilities.push_back(delta);
    // r in (0, 1] so that delta = 0 never mutates and delta = 1 always does.
    const double r = 1.0 - unit(rng);
    if (delta >= r) {
      std::tie(o1, o2) = multi_mutate(std::move(o1), std::move(o2), space, rng);
      ++out.mutated_pairs;
    }
    out.offspring.push_back(std::move(o1));
    out.offspring.push_back(std::move(o2));
  }
  out.offspring.resize(offspring_count);
  return out;
}

RapidStepResult rapid_ga_step(std::span<const Individual> population,
                              const ExperienceMemory& memory,
                              const SearchSpace& space,
                              const RapidStepConfig& cfg, Rng& rng) {
  return rapid_ga_step(population, memory, space, cfg, population.size(), rng);
}

}  // namespace rghl
