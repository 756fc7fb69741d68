#pragma once

// Synthetic black-box objectives, repeated-run experiments and the metric
// pipeline (step-wise mean of best-so-far, cumulative means, Student-t
// confidence bands).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rghl/errors.hpp"
#include "rghl/experience.hpp"
#include "rghl/optimizer.hpp"
#include "rghl/search_space.hpp"

namespace rghl::bench {

enum class ObjectiveKind {
  separable_linear,
  quadratic_bowl,
  rastrigin_grid,
  deceptive_plateau,
  noisy_bowl,
};

std::string to_string(ObjectiveKind k);
// Throws UnsupportedKind.
ObjectiveKind parse_objective_kind(std::string_view name);

inline constexpr double kRastriginA = 10.0;
inline constexpr double kRastriginBound = 5.12;

class SyntheticObjective {
 public:
  SyntheticObjective(ObjectiveKind kind, SearchSpace space, double noise_sd,
                     std::uint64_t seed);

  ObjectiveKind kind() const { return kind_; }
  const SearchSpace& space() const { return space_; }
  double noise_sd() const { return noise_sd_; }
  std::uint64_t seed() const { return seed_; }

  // Noise-free value.
  double clean_value(const Chromosome& c) const;
  // clean_value plus N(0, noise_sd^2) noise keyed on (c, draw_index, seed).
  double value(const Chromosome& c, std::uint64_t draw_index) const;

  // Global optimum of clean_value.
  const Chromosome& optimum() const { return optimum_; }
  double optimum_value() const { return optimum_value_; }

 private:
  ObjectiveKind kind_;
  SearchSpace space_;
  double noise_sd_;
  std::uint64_t seed_;
  Chromosome planted_;  // bowl target or plateau cell
  Chromosome optimum_;
  double optimum_value_ = 0.0;
};

SyntheticObjective make_objective(ObjectiveKind kind, SearchSpace space,
                                  double noise_sd, std::uint64_t seed);

// Budgeted view of a synthetic objective; the draw index is the evaluation
// index.
ObjectiveFunction budgeted(const SyntheticObjective& objective,
                           std::size_t budget);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;
  // Fewer than two samples; half_width is 0.
  bool insufficient = false;
};

// Two-sided Student-t quantile t_{p, dof}.
double t_quantile(double p, double dof);

// mean +- t_{(1+level)/2, n-1} * sd / sqrt(n), sd with n - 1 denominator.
Interval compute_ci(std::span<const double> samples, double level);

struct AggregateCurves {
  std::vector<double> mean_best;        // mean over runs of best-so-far
  std::vector<double> cumulative_mean;  // running mean of step_mean
  std::vector<double> step_mean;        // mean over runs of fitness at step
  std::vector<double> ci90;
  std::vector<double> ci95;
  std::vector<double> ci99;

  std::size_t size() const { return mean_best.size(); }
};

// Index-aligned aggregation. Every trace must have exactly `steps` rows.
AggregateCurves aggregate(std::span<const RunTrace> traces, std::size_t steps);

enum class StrategyKind { rghl, rgh_knn, random_search, ga_eg, rapid_ga };

std::string to_string(StrategyKind k);
// Throws ConfigError.
StrategyKind parse_strategy_kind(std::string_view name);

struct StrategySpec {
  std::string label;
  StrategyKind kind = StrategyKind::rghl;
  double epsilon = 0.5;  // ga_eg only
};

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::quadratic_bowl;
  SearchSpace space = SearchSpace::uniform_grid(9, 16);
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::vector<StrategySpec> strategies;
  ObjectiveSpec objective;
  std::size_t budget = 300;
  std::size_t repeats = 30;
  std::uint64_t base_seed = 0;
  // Population settings for the generational strategies. When
  // `generations` is unset it is ceil(budget / population) - 1, so every
  // run spends the whole budget.
  RghlConfig rghl = RghlConfig::defaults_for(20);
  std::optional<std::size_t> generations;
  std::size_t jobs = 1;
};

// One run of one strategy. The trace is labelled with spec.label.
RunResult run_strategy(const StrategySpec& spec, const ObjectiveSpec& objective,
                       const ExperimentConfig& cfg, std::uint64_t seed);

struct StrategySummary {
  double mean_final_best = 0.0;
  double ci95_half_width = 0.0;
  double mean_wall_time_sec = 0.0;
  std::vector<double> final_best;  // per repeat
};

struct StrategyOutcome {
  StrategySpec spec;
  std::vector<RunTrace> traces;  // by repeat index
  AggregateCurves curves;
  StrategySummary summary;
};

struct ExperimentResult {
  std::vector<StrategyOutcome> strategies;
};

class ExperimentError : public Error {
 public:
  ExperimentError(std::string what, ExperimentResult partial)
      : Error(std::move(what)), partial_(std::move(partial)) {}
  const ExperimentResult& partial() const { return partial_; }

 private:
  ExperimentResult partial_;
};

// Repeat i of every strategy runs with seed base_seed + i. Repeats run on
// cfg.jobs threads; results are ordered by (strategy, repeat) regardless.
// A failed run throws ExperimentError carrying the completed traces.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct Improvement {
  std::string baseline;
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  std::size_t pairs = 0;  // repeats with a nonzero baseline
};

// Per repeat (baseline - candidate) / baseline for the first strategy
// against each of the others, then averaged over repeats.
std::vector<Improvement> relative_improvements(const ExperimentResult& result);

void write_trace_csv(std::ostream& os, const RunTrace& trace);
void write_curves_dat(std::ostream& os, const ExperimentResult& result);
// Keys are strategy labels. Wall time is null unless include_wall_time.
nlohmann::json summary_json(const ExperimentResult& result,
                            bool include_wall_time);

// Shortest decimal form that round-trips.
std::string format_double(double v);

}  // namespace rghl::bench
