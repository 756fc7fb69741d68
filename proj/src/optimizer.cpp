#include "rghl/optimizer.hpp"

#include <chrono>

#include "rghl/errors.hpp"

namespace rghl {

ObjectiveFunction::ObjectiveFunction(Fn fn, std::size_t budget)
    : fn_(std::move(fn)), budget_(budget) {}

double ObjectiveFunction::evaluate(const Chromosome& c) {
  if (eval_count_ >= budget_) {
    throw BudgetExhausted("objective budget of " + std::to_string(budget_) +
                          " evaluations is exhausted");
  }
  return fn_(c, eval_count_++);
}

RghlConfig RghlConfig::defaults_for(std::size_t population) {
  RghlConfig cfg;
  cfg.population = population;
  cfg.exploit_count = population / 2;
  cfg.rhc.seeds = std::max<std::size_t>(1, cfg.exploit_count);
  cfg.ampf.window = 2 * population;
  cfg.selection = SelectionConfig::for_population(population);
  return cfg;
}

void RghlConfig::validate(bool exploiting) const {
  if (population < 4 || population % 2 != 0) {
    throw ConfigError("population must be even and >= 4");
  }
  if (exploiting && (exploit_count < 1 || exploit_count >= population)) {
    throw ConfigError("exploit_count must satisfy 1 <= exploit_count < population");
  }
  if (selection.top_n < 2 || selection.top_n > population) {
    throw ConfigError("top_n must satisfy 2 <= top_n <= population");
  }
  rhc.validate();
  ampf.validate();
  if (!(surrogate.ridge >= 0.0)) throw ConfigError("ridge must be >= 0");
}

Chromosome random_chromosome(const SearchSpace& space, Rng& rng) {
  Chromosome c;
  c.genes.resize(space.n_genes());
  for (std::size_t i = 0; i < c.genes.size(); ++i) {
    std::uniform_int_distribution<std::uint32_t> gene(
        0, static_cast<std::uint32_t>(space.cardinality(i) - 1));
    c.genes[i] = gene(rng);
  }
  return c;
}

namespace {

class RunRecorder {
 public:
  RunRecorder(ObjectiveFunction& objective, RunResult& result)
      : objective_(objective), result_(result) {}

  // Evaluates and records `c`. Throws BudgetExhausted.
  double evaluate(const Chromosome& c, Origin origin) {
    const double f = objective_.evaluate(c);
    const auto& rec = result_.memory.store(c, f, origin);
    result_.trace.append(origin, f);
    if (rec.eval_index == 0 || f < result_.best_fitness) {
      result_.best = c;
      result_.best_fitness = f;
    }
    return f;
  }

 private:
  ObjectiveFunction& objective_;
  RunResult& result_;
};

template <typename Body>
RunResult timed_run(const std::string& strategy, std::uint64_t seed,
                    Body&& body) {
  RunResult result;
  result.trace.strategy = strategy;
  result.trace.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(result);
  } catch (const BudgetExhausted&) {
    result.truncated = true;
  }
  result.trace.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace

RunResult run_population_search(ObjectiveFunction& objective,
                                const SearchSpace& space,
                                const RghlConfig& cfg,
                                std::size_t exploit_count,
                                const MutationSchedule& mutation,
                                const std::string& strategy) {
  if (exploit_count >= cfg.population) {
    throw ConfigError("exploit_count must be below the population size");
  }
  return timed_run(strategy, cfg.seed, [&](RunResult& result) {
    Rng rng(cfg.seed);
    RunRecorder rec(objective, result);

    std::vector<Individual> population;
    population.reserve(cfg.population);
    for (std::size_t i = 0; i < cfg.population; ++i) {
      auto c = random_chromosome(space, rng);
      const double f = rec.evaluate(c, Origin::random);
      population.push_back({std::move(c), f});
    }

    const RapidStepConfig step_cfg{cfg.selection, mutation};
    for (std::size_t g = 0; g < cfg.generations; ++g) {
      auto step = rapid_ga_step(population, result.memory, space, step_cfg,
                                cfg.population - exploit_count, rng);
      result.mutation_probabilities.insert(
          result.mutation_probabilities.end(),
          step.mutation_probabilities.begin(),
          step.mutation_probabilities.end());
      result.mutated_pairs += step.mutated_pairs;

      std::vector<Individual> next;
      next.reserve(cfg.population);
      for (auto& c : step.offspring) {
        const double f = rec.evaluate(c, Origin::genetic);
        next.push_back({std::move(c), f});
      }

      if (exploit_count > 0) {
        const auto candidates =
            rhclm(result.memory, space, cfg.rhc, cfg.surrogate, rng);
        for (std::size_t i = 0; i < exploit_count; ++i) {
          const auto& c = candidates[i % candidates.size()];
          const double f = rec.evaluate(c, Origin::surrogate);
          next.push_back({c, f});
        }
      }
      population = std::move(next);
      ++result.generations_completed;
    }
  });
}

RunResult run_rghl(ObjectiveFunction& objective, const SearchSpace& space,
                   const RghlConfig& cfg) {
  cfg.validate(true);
  return run_population_search(objective, space, cfg, cfg.exploit_count,
                               MutationSchedule::adaptive(cfg.ampf), "rghl");
}

RunResult run_rapid_ga(ObjectiveFunction& objective, const SearchSpace& space,
                       const RghlConfig& cfg) {
  cfg.validate(false);
  return run_population_search(objective, space, cfg, 0,
                               MutationSchedule::adaptive(cfg.ampf),
                               "rapid_ga");
}

RunResult run_ga_eg(ObjectiveFunction& objective, const SearchSpace& space,
                    const RghlConfig& cfg, double epsilon) {
  cfg.validate(false);
  return run_population_search(objective, space, cfg, 0,
                               MutationSchedule::constant(epsilon), "ga_eg");
}

RunResult run_random_search(ObjectiveFunction& objective,
                            const SearchSpace& space, std::size_t budget,
                            std::uint64_t seed) {
  if (budget < 1) throw ConfigError("random search budget must be >= 1");
  return timed_run("random_search", seed, [&](RunResult& result) {
    Rng rng(seed);
    RunRecorder rec(objective, result);
    for (std::size_t i = 0; i < budget; ++i) {
      rec.evaluate(random_chromosome(space, rng), Origin::random);
    }
  });
}

}  // namespace rghl
