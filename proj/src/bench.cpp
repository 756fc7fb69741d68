#include "rghl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

namespace rghl::bench {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double rastrigin_term(double u) {
  const double x = -kRastriginBound + 2.0 * kRastriginBound * u;
  return x * x - kRastriginA * std::cos(2.0 * M_PI * x);
}

}  // namespace

std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::separable_linear:
      return "separable_linear";
    case ObjectiveKind::quadratic_bowl:
      return "quadratic_bowl";
    case ObjectiveKind::rastrigin_grid:
      return "rastrigin_grid";
    case ObjectiveKind::deceptive_plateau:
      return "deceptive_plateau";
    case ObjectiveKind::noisy_bowl:
      return "noisy_bowl";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  for (auto k : {ObjectiveKind::separable_linear, ObjectiveKind::quadratic_bowl,
                 ObjectiveKind::rastrigin_grid,
                 ObjectiveKind::deceptive_plateau, ObjectiveKind::noisy_bowl}) {
    if (to_string(k) == name) return k;
  }
  throw UnsupportedKind("unsupported objective kind '" + std::string(name) +
                        "'");
}

SyntheticObjective::SyntheticObjective(ObjectiveKind kind, SearchSpace space,
                                       double noise_sd, std::uint64_t seed)
    : kind_(kind), space_(std::move(space)), noise_sd_(noise_sd), seed_(seed) {
  if (!(noise_sd_ >= 0.0)) throw ConfigError("noise_sd must be >= 0");
  const std::size_t n = space_.n_genes();
  // Mixed so the planted cell is unrelated to a strategy seeded alike.
  Rng rng(splitmix64(seed_ ^ 0x6f626a6563746976ULL));
  planted_ = random_chromosome(space_, rng);

  switch (kind_) {
    case ObjectiveKind::separable_linear:
      optimum_.genes.assign(n, 0);
      break;
    case ObjectiveKind::quadratic_bowl:
    case ObjectiveKind::noisy_bowl:
    case ObjectiveKind::deceptive_plateau:
      optimum_ = planted_;
      break;
    case ObjectiveKind::rastrigin_grid: {
      // Separable, so the optimum is the per-dimension grid minimizer.
      optimum_.genes.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t card = space_.cardinality(i);
        const double span = static_cast<double>(std::max<std::size_t>(1, card - 1));
        std::uint32_t best = 0;
        for (std::uint32_t g = 1; g < card; ++g) {
          if (rastrigin_term(g / span) < rastrigin_term(best / span)) best = g;
        }
        optimum_.genes[i] = best;
      }
      break;
    }
  }
  optimum_value_ = clean_value(optimum_);
}

double SyntheticObjective::clean_value(const Chromosome& c) const {
  const auto u = normalize(c, space_);
  switch (kind_) {
    case ObjectiveKind::separable_linear:
      return std::accumulate(u.begin(), u.end(), 0.0);
    case ObjectiveKind::quadratic_bowl:
    case ObjectiveKind::noisy_bowl: {
      const auto t = normalize(planted_, space_);
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        s += (u[i] - t[i]) * (u[i] - t[i]);
      }
      return s;
    }
    case ObjectiveKind::rastrigin_grid: {
      double s = kRastriginA * static_cast<double>(u.size());
      for (double ui : u) s += rastrigin_term(ui);
      return s;
    }
    case ObjectiveKind::deceptive_plateau:
      return c == planted_ ? 0.0 : 1.0;
  }
  throw UnsupportedKind("unsupported objective kind");
}

double SyntheticObjective::value(const Chromosome& c,
                                 std::uint64_t draw_index) const {
  const double clean = clean_value(c);
  if (noise_sd_ == 0.0) return clean;
  std::uint64_t h = splitmix64(seed_ ^ splitmix64(draw_index));
  for (auto g : c.genes) h = splitmix64(h ^ g);
  std::mt19937_64 rng(h);
  std::normal_distribution<double> noise(0.0, noise_sd_);
  return clean + noise(rng);
}

SyntheticObjective make_objective(ObjectiveKind kind, SearchSpace space,
                                  double noise_sd, std::uint64_t seed) {
  return SyntheticObjective(kind, std::move(space), noise_sd, seed);
}

ObjectiveFunction budgeted(const SyntheticObjective& objective,
                           std::size_t budget) {
  return ObjectiveFunction(
      [&objective](const Chromosome& c, std::size_t i) {
        return objective.value(c, i);
      },
      budget);
}

double t_quantile(double p, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

Interval compute_ci(std::span<const double> samples, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("confidence level must lie in (0, 1)");
  }
  Interval out;
  const std::size_t n = samples.size();
  if (n == 0) {
    out.insufficient = true;
    return out;
  }
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
             static_cast<double>(n);
  if (n < 2) {
    out.insufficient = true;
    return out;
  }
  double ss = 0.0;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return out;
  const double t = t_quantile((1.0 + level) / 2.0, static_cast<double>(n - 1));
  out.half_width = t * sd / std::sqrt(static_cast<double>(n));
  return out;
}

AggregateCurves aggregate(std::span<const RunTrace> traces, std::size_t steps) {
  for (const auto& t : traces) {
    if (t.size() != steps) {
      throw LengthMismatch("trace has " + std::to_string(t.size()) +
                           " rows, expected " + std::to_string(steps));
    }
  }
  AggregateCurves c;
  std::vector<double> best(traces.size());
  std::vector<double> fit(traces.size());
  double running = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t r = 0; r < traces.size(); ++r) {
      best[r] = traces[r].rows[k].best_so_far;
      fit[r] = traces[r].rows[k].fitness;
    }
    c.mean_best.push_back(compute_ci(best, 0.95).mean);
    const auto i90 = compute_ci(fit, 0.90);
    c.step_mean.push_back(i90.mean);
    c.ci90.push_back(i90.half_width);
    c.ci95.push_back(compute_ci(fit, 0.95).half_width);
    c.ci99.push_back(compute_ci(fit, 0.99).half_width);
    running += i90.mean;
    c.cumulative_mean.push_back(running / static_cast<double>(k + 1));
  }
  return c;
}

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::rghl:
      return "rghl";
    case StrategyKind::rgh_knn:
      return "rgh_knn";
    case StrategyKind::random_search:
      return "random_search";
    case StrategyKind::ga_eg:
      return "ga_eg";
    case StrategyKind::rapid_ga:
      return "rapid_ga";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  for (auto k : {StrategyKind::rghl, StrategyKind::rgh_knn,
                 StrategyKind::random_search, StrategyKind::ga_eg,
                 StrategyKind::rapid_ga}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

RunResult run_strategy(const StrategySpec& spec, const ObjectiveSpec& objective,
                       const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto synthetic = make_objective(objective.kind, objective.space,
                                        objective.noise_sd, objective.seed);
  auto fn = budgeted(synthetic, cfg.budget);

  RghlConfig rcfg = cfg.rghl;
  rcfg.seed = seed;
  rcfg.generations = cfg.generations.value_or(
      (cfg.budget + rcfg.population - 1) / rcfg.population - 1);

  RunResult result;
  switch (spec.kind) {
    case StrategyKind::rghl:
      result = run_rghl(fn, synthetic.space(), rcfg);
      break;
    case StrategyKind::rgh_knn:
      rcfg.surrogate.kind = SurrogateKind::knn;
      result = run_rghl(fn, synthetic.space(), rcfg);
      break;
    case StrategyKind::random_search:
      result = run_random_search(fn, synthetic.space(), cfg.budget, seed);
      break;
    case StrategyKind::ga_eg:
      result = run_ga_eg(fn, synthetic.space(), rcfg, spec.epsilon);
      break;
    case StrategyKind::rapid_ga:
      result = run_rapid_ga(fn, synthetic.space(), rcfg);
      break;
  }
  result.trace.strategy = spec.label;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (cfg.budget < 1) throw ConfigError("budget must be >= 1");
  if (cfg.strategies.empty()) throw ConfigError("no strategies configured");

  const std::size_t n_strategies = cfg.strategies.size();
  const std::size_t n_tasks = n_strategies * cfg.repeats;
  std::vector<std::optional<RunTrace>> traces(n_tasks);
  std::vector<std::string> errors(n_tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      const std::size_t s = t / cfg.repeats;
      const std::size_t r = t % cfg.repeats;
      try {
        auto run = run_strategy(cfg.strategies[s], cfg.objective, cfg,
                                cfg.base_seed + r);
        traces[t] = std::move(run.trace);
      } catch (const std::exception& e) {
        errors[t] = e.what();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(cfg.jobs, 1, n_tasks);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  ExperimentResult result;
  std::string failure;
  for (std::size_t s = 0; s < n_strategies; ++s) {
    StrategyOutcome out;
    out.spec = cfg.strategies[s];
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      const std::size_t t = s * cfg.repeats + r;
      if (traces[t]) {
        out.traces.push_back(std::move(*traces[t]));
      } else if (failure.empty()) {
        failure = out.spec.label + " repeat " + std::to_string(r) + ": " +
                  errors[t];
      }
    }
    result.strategies.push_back(std::move(out));
  }
  if (!failure.empty()) throw ExperimentError(failure, std::move(result));

  for (auto& out : result.strategies) {
    out.curves = aggregate(out.traces, cfg.budget);
    auto& sum = out.summary;
    double wall = 0.0;
    for (const auto& t : out.traces) {
      sum.final_best.push_back(t.rows.back().best_so_far);
      wall += t.wall_time_sec;
    }
    const auto ci = compute_ci(sum.final_best, 0.95);
    sum.mean_final_best = ci.mean;
    sum.ci95_half_width = ci.half_width;
    sum.mean_wall_time_sec = wall / static_cast<double>(out.traces.size());
  }
  return result;
}

std::vector<Improvement> relative_improvements(const ExperimentResult& result) {
  std::vector<Improvement> out;
  if (result.strategies.size() < 2) return out;
  const auto& cand = result.strategies.front().summary.final_best;
  for (std::size_t s = 1; s < result.strategies.size(); ++s) {
    const auto& base = result.strategies[s].summary.final_best;
    Improvement imp;
    imp.baseline = result.strategies[s].spec.label;
    double sum = 0.0;
    for (std::size_t r = 0; r < std::min(cand.size(), base.size()); ++r) {
      if (base[r] == 0.0) continue;
      const double v = (base[r] - cand[r]) / base[r];
      if (imp.pairs == 0) {
        imp.max = imp.min = v;
      } else {
        imp.max = std::max(imp.max, v);
        imp.min = std::min(imp.min, v);
      }
      sum += v;
      ++imp.pairs;
    }
    if (imp.pairs > 0) imp.mean = sum / static_cast<double>(imp.pairs);
    out.push_back(imp);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << "eval_index,origin,fitness,best_so_far\n";
  for (const auto& row : trace.rows) {
    os << row.eval_index << ',' << to_string(row.origin) << ','
       << format_double(row.fitness) << ',' << format_double(row.best_so_far)
       << '\n';
  }
}

void write_curves_dat(std::ostream& os, const ExperimentResult& result) {
  os << 'n';
  for (const auto& s : result.strategies) {
    const auto& l = s.spec.label;
    os << ' ' << l << "_min " << l << "_mean " << l << "_step_mean " << l
       << "_ci90 " << l << "_ci95 " << l << "_ci99";
  }
  os << '\n';
  const std::size_t steps =
      result.strategies.empty() ? 0 : result.strategies.front().curves.size();
  for (std::size_t k = 0; k < steps; ++k) {
    os << (k + 1);
    for (const auto& s : result.strategies) {
      const auto& c = s.curves;
      for (double v : {c.mean_best[k], c.cumulative_mean[k], c.step_mean[k],
                       c.ci90[k], c.ci95[k], c.ci99[k]}) {
        os << ' ' << format_double(v);
      }
    }
    os << '\n';
  }
}

nlohmann::json summary_json(const ExperimentResult& result,
                            bool include_wall_time) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& s : result.strategies) {
    nlohmann::json row;
    row["mean_final_best"] = s.summary.mean_final_best;
    row["ci95_half_width"] = s.summary.ci95_half_width;
    row["mean_wall_time_sec"] =
        include_wall_time ? nlohmann::json(s.summary.mean_wall_time_sec)
                          : nlohmann::json(nullptr);
    // Synthetic objectives have no held-out split.
    row["test_loss"] = nullptr;
    row["repeats"] = s.traces.size();
    out[s.spec.label] = std::move(row);
  }
  return out;
}

}  // namespace rghl::bench
