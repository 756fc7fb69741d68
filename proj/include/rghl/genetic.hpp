#pragma once

// Exploration strategy: rapid genetic operators and the adaptive mutation
// probability function.
//
// Each offspring pair goes through top-N parent selection, a multi-point
// crossover that swaps a random number of genes, and, with probability
// delta, a multi-gene mutation. delta comes from the slope of the recent
// fitness history: a flat history gives delta = 1, a steep one pushes delta
// toward 0.5.

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "rghl/experience.hpp"
#include "rghl/search_space.hpp"

namespace rghl {

using Rng = std::mt19937_64;

struct AmpfConfig {
  double alpha = 2.0;      // intensity factor, >= 1
  std::size_t window = 40; // most recent fitness records used for the slope

  void validate() const;
};

struct SlopeFit {
  double intercept = 0.0;
  double slope = 0.0;
};

struct SelectionConfig {
  std::size_t top_n = 2;

  // max(2, ceil(population / 4))
  static SelectionConfig for_population(std::size_t population);
};

struct Individual {
  Chromosome chromosome;
  double fitness = 0.0;
};

// Least-squares line through the last min(window, scores.size()) scores
// placed at equally spaced abscissae on [0, 1].
// Throws InsufficientHistory with fewer than two scores.
SlopeFit fit_slope(std::span<const double> scores, std::size_t window);

// 1.5 - 1 / (1 + exp(-alpha * |slope|)), in (0.5, 1].
double ampf(double slope, double alpha);
double ampf(const SlopeFit& fit, const AmpfConfig& cfg);

// Either the adaptive function above or a constant probability.
class MutationSchedule {
 public:
  static MutationSchedule adaptive(AmpfConfig cfg);
  static MutationSchedule constant(double probability);

  bool is_adaptive() const { return adaptive_; }
  const AmpfConfig& ampf_config() const { return ampf_; }

  double probability(const ExperienceMemory& memory) const;

 private:
  bool adaptive_ = true;
  AmpfConfig ampf_;
  double constant_ = 0.5;
};

// Two distinct individuals drawn uniformly from the top_n best (lowest
// fitness, ties by position). Throws PopulationTooSmall below two.
std::pair<Chromosome, Chromosome> select_parents(
    std::span<const Individual> population, const SelectionConfig& cfg,
    Rng& rng);

// `count` distinct positions out of [0, n), uniformly.
std::vector<std::size_t> choose_positions(std::size_t n, std::size_t count,
                                          Rng& rng);

// Offspring start as copies of the parents and exchange genes at `positions`.
std::pair<Chromosome, Chromosome> crossover_at(
    const Chromosome& p1, const Chromosome& p2,
    std::span<const std::size_t> positions);

// Swaps m ~ U{1..n} distinct positions. Throws LengthMismatch.
std::pair<Chromosome, Chromosome> multi_crossover(const Chromosome& p1,
                                                  const Chromosome& p2,
                                                  Rng& rng);

// Resamples k ~ U{1..n} distinct genes of `c` uniformly over their grids.
void mutate_in_place(Chromosome& c, const SearchSpace& space, Rng& rng);

std::pair<Chromosome, Chromosome> multi_mutate(Chromosome o1, Chromosome o2,
                                               const SearchSpace& space,
                                               Rng& rng);

struct RapidStepConfig {
  SelectionConfig selection;
  MutationSchedule mutation = MutationSchedule::adaptive({});
};

struct RapidStepResult {
  std::vector<Chromosome> offspring;
  // One delta per offspring pair, in generation order.
  std::vector<double> mutation_probabilities;
  std::size_t mutated_pairs = 0;
};

// Produces `offspring_count` children from `population`. The last pair is
// truncated when the count is odd.
RapidStepResult rapid_ga_step(std::span<const Individual> population,
                              const ExperienceMemory& memory,
                              const SearchSpace& space,
                              const RapidStepConfig& cfg,
                              std::size_t offspring_count, Rng& rng);

// As above with offspring_count = population.size().
RapidStepResult rapid_ga_step(std::span<const Individual> population,
                              const ExperienceMemory& memory,
                              const SearchSpace& space,
                              const RapidStepConfig& cfg, Rng& rng);

}  // namespace rghl
