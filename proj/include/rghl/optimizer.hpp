#pragma once

// Generational drivers: RGHL (rapid genetic exploration plus surrogate
// hill-climbing exploitation) and the baselines it is compared against.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rghl/experience.hpp"
#include "rghl/genetic.hpp"
#include "rghl/search_space.hpp"
#include "rghl/surrogate.hpp"

namespace rghl {

// A budgeted black-box. Lower fitness is better.
class ObjectiveFunction {
 public:
  // `fn` receives the chromosome and its zero-based evaluation index.
  using Fn = std::function<double(const Chromosome&, std::size_t)>;

  ObjectiveFunction(Fn fn, std::size_t budget);

  // Throws BudgetExhausted once eval_count() == budget().
  double evaluate(const Chromosome& c);

  std::size_t eval_count() const { return eval_count_; }
  std::size_t budget() const { return budget_; }
  std::size_t remaining() const { return budget_ - eval_count_; }

 private:
  Fn fn_;
  std::size_t budget_;
  std::size_t eval_count_ = 0;
};

struct RghlConfig {
  std::size_t population = 20;    // psi
  std::size_t generations = 14;   // omega
  std::size_t exploit_count = 10; // xi, surrogate candidates per generation
  RhcConfig rhc;
  AmpfConfig ampf;
  SelectionConfig selection;
  SurrogateSpec surrogate;
  std::uint64_t seed = 0;

  // psi/2 exploit split, quartile selection pool, slope window 2 * psi,
  // rhc seeds = xi.
  static RghlConfig defaults_for(std::size_t population);

  // `exploiting` is false for the pure genetic baselines, which ignore
  // exploit_count.
  void validate(bool exploiting = true) const;
};

struct RunResult {
  Chromosome best;
  double best_fitness = 0.0;
  RunTrace trace;
  ExperienceMemory memory;
  // Set when the objective budget ran out before the configured schedule.
  bool truncated = false;
  std::size_t generations_completed = 0;
  // One mutation probability per offspring pair, in order.
  std::vector<double> mutation_probabilities;
  std::size_t mutated_pairs = 0;
};

RunResult run_rghl(ObjectiveFunction& objective, const SearchSpace& space,
                   const RghlConfig& cfg);

RunResult run_random_search(ObjectiveFunction& objective,
                            const SearchSpace& space, std::size_t budget,
                            std::uint64_t seed);

// Rapid GA with a constant mutation probability `epsilon`.
RunResult run_ga_eg(ObjectiveFunction& objective, const SearchSpace& space,
                    const RghlConfig& cfg, double epsilon);

// Rapid GA with adaptive mutation and no surrogate exploitation.
RunResult run_rapid_ga(ObjectiveFunction& objective, const SearchSpace& space,
                       const RghlConfig& cfg);

// The shared generational loop: psi random individuals, then per generation
// psi - exploit_count genetic offspring followed by exploit_count surrogate
// candidates. The named strategies above are thin wrappers over this.
RunResult run_population_search(ObjectiveFunction& objective,
                                const SearchSpace& space,
                                const RghlConfig& cfg,
                                std::size_t exploit_count,
                                const MutationSchedule& mutation,
                                const std::string& strategy);

Chromosome random_chromosome(const SearchSpace& space, Rng& rng);

}  // namespace rghl
