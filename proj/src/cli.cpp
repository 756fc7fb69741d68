#include "rghl/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace rghl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown field '" + key + "' in " + where);
    }
  }
}

std::uint64_t get_u64(const json& v, const std::string& name) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError("'" + name + "' must be a non-negative integer");
}

std::size_t get_size(const json& v, const std::string& name) {
  return static_cast<std::size_t>(get_u64(v, name));
}

double get_double(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError("'" + name + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError("'" + name + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError("'" + name + "' must be a string");
  return v.get<std::string>();
}

bool valid_label(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '-' || c == '.';
  });
}

std::vector<bench::StrategySpec> parse_strategies(const json& arr) {
  if (!arr.is_array() || arr.empty()) {
    throw ConfigError("'strategies' must be a non-empty array");
  }
  std::vector<bench::StrategySpec> out;
  std::set<std::string> labels;
  for (const auto& entry : arr) {
    bench::StrategySpec spec;
    std::optional<std::string> label;
    if (entry.is_string()) {
      spec.kind = bench::parse_strategy_kind(entry.get<std::string>());
    } else {
      check_keys(entry, {"name", "label", "epsilon"}, "strategy entry");
      if (!entry.contains("name")) {
        throw ConfigError("strategy entry needs a 'name'");
      }
      spec.kind = bench::parse_strategy_kind(get_string(entry["name"], "name"));
      if (entry.contains("label")) label = get_string(entry["label"], "label");
      if (entry.contains("epsilon")) {
        if (spec.kind != bench::StrategyKind::ga_eg) {
          throw ConfigError("'epsilon' only applies to ga_eg");
        }
        spec.epsilon = get_double(entry["epsilon"], "epsilon");
        if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) {
          throw ConfigError("'epsilon' must lie in [0, 1]");
        }
      }
    }
    if (label) {
      if (!valid_label(*label)) {
        throw ConfigError("label '" + *label +
                          "' may only use letters, digits, '_', '-' and '.'");
      }
      if (labels.count(*label)) {
        throw ConfigError("duplicate strategy label '" + *label + "'");
      }
      spec.label = *label;
    } else {
      // Repeated entries get _2, _3, ... suffixes.
      const std::string base = bench::to_string(spec.kind);
      spec.label = base;
      for (int k = 2; labels.count(spec.label); ++k) {
        spec.label = base + "_" + std::to_string(k);
      }
    }
    labels.insert(spec.label);
    out.push_back(spec);
  }
  return out;
}

bench::ObjectiveSpec parse_objective(const json& obj) {
  check_keys(obj,
             {"kind", "dimensions", "cardinality", "search_space", "noise_sd",
              "seed"},
             "objective");
  bench::ObjectiveSpec spec;
  if (obj.contains("kind")) {
    spec.kind = bench::parse_objective_kind(get_string(obj["kind"], "kind"));
  }
  const bool grid = obj.contains("dimensions") || obj.contains("cardinality");
  if (grid && obj.contains("search_space")) {
    throw ConfigError(
        "objective takes either dimensions/cardinality or search_space");
  }
  if (obj.contains("search_space")) {
    spec.space = SearchSpace::from_json(obj["search_space"]);
  } else if (grid) {
    const auto n = obj.contains("dimensions")
                       ? get_size(obj["dimensions"], "dimensions")
                       : std::size_t{9};
    const auto k = obj.contains("cardinality")
                       ? get_size(obj["cardinality"], "cardinality")
                       : std::size_t{16};
    spec.space = SearchSpace::uniform_grid(n, k);
  }
  if (obj.contains("noise_sd")) {
    spec.noise_sd = get_double(obj["noise_sd"], "noise_sd");
    if (!(spec.noise_sd >= 0.0)) throw ConfigError("'noise_sd' must be >= 0");
  }
  if (obj.contains("seed")) spec.seed = get_u64(obj["seed"], "seed");
  return spec;
}

void parse_rghl(const json& obj, bench::ExperimentConfig& exp) {
  check_keys(obj,
             {"population", "generations", "exploit_count", "top_n", "alpha",
              "slope_window", "rhc_steps", "rhc_seeds", "max_climb", "ridge",
              "knn_k"},
             "rghl");
  const std::size_t population =
      obj.contains("population") ? get_size(obj["population"], "population")
                                 : std::size_t{20};
  auto cfg = RghlConfig::defaults_for(population);
  if (obj.contains("exploit_count")) {
    cfg.exploit_count = get_size(obj["exploit_count"], "exploit_count");
    cfg.rhc.seeds = std::max<std::size_t>(1, cfg.exploit_count);
  }
  if (obj.contains("generations") && !obj["generations"].is_null()) {
    exp.generations = get_size(obj["generations"], "generations");
  }
  if (obj.contains("top_n")) {
    cfg.selection.top_n = get_size(obj["top_n"], "top_n");
  }
  if (obj.contains("alpha")) cfg.ampf.alpha = get_double(obj["alpha"], "alpha");
  if (obj.contains("slope_window")) {
    cfg.ampf.window = get_size(obj["slope_window"], "slope_window");
  }
  if (obj.contains("rhc_steps")) {
    cfg.rhc.steps = get_size(obj["rhc_steps"], "rhc_steps");
  }
  if (obj.contains("rhc_seeds")) {
    cfg.rhc.seeds = get_size(obj["rhc_seeds"], "rhc_seeds");
  }
  if (obj.contains("max_climb")) {
    cfg.rhc.max_climb = get_size(obj["max_climb"], "max_climb");
  }
  if (obj.contains("ridge")) {
    cfg.surrogate.ridge = get_double(obj["ridge"], "ridge");
  }
  if (obj.contains("knn_k")) {
    cfg.surrogate.knn_k = get_size(obj["knn_k"], "knn_k");
    if (cfg.surrogate.knn_k < 1) throw ConfigError("'knn_k' must be >= 1");
  }
  exp.rghl = cfg;
}

void validate_experiment(const bench::ExperimentConfig& exp) {
  if (exp.budget < 1) throw ConfigError("'budget' must be >= 1");
  if (exp.repeats < 1) throw ConfigError("'repeats' must be >= 1");
  const bool population_based =
      std::any_of(exp.strategies.begin(), exp.strategies.end(), [](auto& s) {
        return s.kind != bench::StrategyKind::random_search;
      });
  if (!population_based) return;
  const bool exploiting =
      std::any_of(exp.strategies.begin(), exp.strategies.end(), [](auto& s) {
        return s.kind == bench::StrategyKind::rghl ||
               s.kind == bench::StrategyKind::rgh_knn;
      });
  exp.rghl.validate(exploiting);
  if (exp.budget < exp.rghl.population) {
    throw ConfigError("'budget' must cover at least one population");
  }
  if (exp.generations &&
      exp.rghl.population * (*exp.generations + 1) > exp.budget) {
    throw ConfigError(
        "population * (generations + 1) exceeds the evaluation budget");
  }
}

}  // namespace

namespace {

RunConfigFile parse_config_document(const json& doc) {
  check_keys(doc,
             {"strategies", "objective", "rghl", "budget", "repeats", "seed",
              "output_dir", "record_wall_time"},
             "run config");
  if (!doc.contains("strategies")) {
    throw ConfigError("run config needs 'strategies'");
  }
  RunConfigFile cfg;
  auto& exp = cfg.experiment;
  exp.strategies = parse_strategies(doc["strategies"]);
  if (doc.contains("objective")) exp.objective = parse_objective(doc["objective"]);
  if (doc.contains("rghl")) parse_rghl(doc["rghl"], exp);
  if (doc.contains("budget")) exp.budget = get_size(doc["budget"], "budget");
  if (doc.contains("repeats")) exp.repeats = get_size(doc["repeats"], "repeats");
  if (doc.contains("seed")) exp.base_seed = get_u64(doc["seed"], "seed");
  if (doc.contains("output_dir")) {
    cfg.output_dir = get_string(doc["output_dir"], "output_dir");
  }
  if (doc.contains("record_wall_time")) {
    cfg.record_wall_time = get_bool(doc["record_wall_time"], "record_wall_time");
  }
  validate_experiment(exp);
  return cfg;
}

}  // namespace

RunConfigFile parse_config(const json& doc) {
  try {
    return parse_config_document(doc);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunConfigFile load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

json resolved_config(const RunConfigFile& cfg) {
  const auto& exp = cfg.experiment;
  json strategies = json::array();
  for (const auto& s : exp.strategies) {
    json e = {{"name", bench::to_string(s.kind)}, {"label", s.label}};
    if (s.kind == bench::StrategyKind::ga_eg) e["epsilon"] = s.epsilon;
    strategies.push_back(std::move(e));
  }
  const auto& r = exp.rghl;
  json doc = {
      {"strategies", std::move(strategies)},
      {"objective",
       {{"kind", bench::to_string(exp.objective.kind)},
        {"search_space", exp.objective.space.to_json()},
        {"noise_sd", exp.objective.noise_sd},
        {"seed", exp.objective.seed}}},
      {"rghl",
       {{"population", r.population},
        {"generations", exp.generations ? json(*exp.generations) : json()},
        {"exploit_count", r.exploit_count},
        {"top_n", r.selection.top_n},
        {"alpha", r.ampf.alpha},
        {"slope_window", r.ampf.window},
        {"rhc_steps", r.rhc.steps},
        {"rhc_seeds", r.rhc.seeds},
        {"max_climb", r.rhc.max_climb},
        {"ridge", r.surrogate.ridge},
        {"knn_k", r.surrogate.knn_k}}},
      {"budget", exp.budget},
      {"repeats", exp.repeats},
      {"seed", exp.base_seed},
      {"record_wall_time", cfg.record_wall_time},
  };
  if (cfg.output_dir) doc["output_dir"] = *cfg.output_dir;
  return doc;
}

std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

fs::path output_directory(const RunConfigFile& cfg, const Overrides& ov) {
  if (ov.out) return *ov.out;
  if (cfg.output_dir) return *cfg.output_dir;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return kDefaultOutDir;
}

namespace {

std::string short_number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

std::string leaderboard(const bench::ExperimentResult& result) {
  std::vector<const bench::StrategyOutcome*> rows;
  for (const auto& s : result.strategies) rows.push_back(&s);
  std::stable_sort(rows.begin(), rows.end(), [](auto a, auto b) {
    return a->summary.mean_final_best < b->summary.mean_final_best;
  });
  std::size_t width = 8;
  for (auto* r : rows) width = std::max(width, r->spec.label.size());

  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "strategy"
     << "  mean_final_best +- ci95\n";
  for (auto* r : rows) {
    os << std::left << std::setw(static_cast<int>(width)) << r->spec.label
       << "  " << short_number(r->summary.mean_final_best) << " +- "
       << short_number(r->summary.ci95_half_width) << '\n';
  }
  return os.str();
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void write_traces(const fs::path& dir, const bench::ExperimentResult& result) {
  fs::create_directories(dir / "traces");
  for (const auto& s : result.strategies) {
    for (std::size_t r = 0; r < s.traces.size(); ++r) {
      std::ostringstream os;
      bench::write_trace_csv(os, s.traces[r]);
      write_file(dir / "traces" / (s.spec.label + "_r" + std::to_string(r) +
                                   ".csv"),
                 os.str());
    }
  }
}

json timing_json(const bench::ExperimentResult& result) {
  json out = json::object();
  for (const auto& s : result.strategies) {
    json runs = json::array();
    for (const auto& t : s.traces) runs.push_back(t.wall_time_sec);
    out[s.spec.label] = {{"mean_wall_time_sec", s.summary.mean_wall_time_sec},
                         {"runs", std::move(runs)}};
  }
  return out;
}

struct Prepared {
  RunConfigFile cfg;
  fs::path dir;
  json resolved;
  std::string config_digest;
};

// Loads the config and applies overrides. Returns nullopt after reporting
// a config error.
std::optional<Prepared> prepare(const fs::path& config, const Overrides& ov,
                                std::ostream& err) {
  try {
    Prepared p;
    p.cfg = load_config(config);
    auto& exp = p.cfg.experiment;
    if (ov.seed) exp.base_seed = *ov.seed;
    if (ov.repeats) {
      if (*ov.repeats < 1) throw ConfigError("--repeats must be >= 1");
      exp.repeats = *ov.repeats;
    }
    exp.jobs = ov.jobs.value_or(
        std::max<std::size_t>(1, std::thread::hardware_concurrency()));
    if (exp.jobs < 1) throw ConfigError("--jobs must be >= 1");
    p.dir = output_directory(p.cfg, ov);
    p.resolved = resolved_config(p.cfg);
    p.resolved.erase("output_dir");
    p.config_digest = digest(p.resolved.dump());
    return p;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return std::nullopt;
  }
}

std::optional<bench::ExperimentResult> execute(const Prepared& p,
                                               std::ostream& err) {
  try {
    auto result = bench::run_experiment(p.cfg.experiment);
    for (auto& s : result.strategies) {
      for (auto& t : s.traces) t.config_digest = p.config_digest;
    }
    return result;
  } catch (const bench::ExperimentError& e) {
    err << "run failed: " << e.what() << '\n';
    try {
      write_traces(p.dir, e.partial());
      write_file(p.dir / "PARTIAL.txt",
                 std::string("experiment aborted; traces/ holds the runs that "
                             "completed before the failure:\n") +
                     e.what() + "\n");
      err << "partial results written to " << p.dir.string() << '\n';
    } catch (const std::exception& w) {
      err << "could not write partial results: " << w.what() << '\n';
    }
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
  }
  return std::nullopt;
}

void write_artifacts(const Prepared& p, const bench::ExperimentResult& result,
                     const std::string& command) {
  fs::create_directories(p.dir);
  write_traces(p.dir, result);
  {
    std::ostringstream os;
    bench::write_curves_dat(os, result);
    write_file(p.dir / "curves.dat", os.str());
  }
  write_file(p.dir / "summary.json",
             bench::summary_json(result, p.cfg.record_wall_time).dump(2) +
                 "\n");
  write_file(p.dir / "timing.json", timing_json(result).dump(2) + "\n");
  const json manifest = {{"version", kVersion},
                         {"command", command},
                         {"config_digest", p.config_digest},
                         {"seed", p.cfg.experiment.base_seed},
                         {"config", p.resolved}};
  write_file(p.dir / "manifest.json", manifest.dump(2) + "\n");
  write_file(p.dir / "config.resolved.json", p.resolved.dump(2) + "\n");
}

}  // namespace

int cmd_run(const fs::path& config, const Overrides& ov, std::ostream& out,
            std::ostream& err) {
  auto p = prepare(config, ov, err);
  if (!p) return 1;
  auto result = execute(*p, err);
  if (!result) return 2;
  try {
    write_artifacts(*p, *result, "run");
  } catch (const std::exception& e) {
    err << "failed writing artifacts: " << e.what() << '\n';
    return 2;
  }
  out << leaderboard(*result);
  out << "artifacts written to " << p->dir.string() << '\n';
  return 0;
}

int cmd_compare(const fs::path& config, const Overrides& ov, std::ostream& out,
                std::ostream& err) {
  auto p = prepare(config, ov, err);
  if (!p) return 1;
  if (p->cfg.experiment.strategies.size() < 2) {
    err << "config error: compare needs at least two strategies\n";
    return 1;
  }
  auto result = execute(*p, err);
  if (!result) return 2;

  const auto board = leaderboard(*result);
  std::ostringstream text;
  text << board;
  const auto imps = bench::relative_improvements(*result);
  json imp_json = json::object();
  const auto& first = result->strategies.front().spec.label;
  if (!imps.empty()) text << "\nimprovement of " << first << " over:\n";
  std::size_t width = 0;
  for (const auto& imp : imps) width = std::max(width, imp.baseline.size());
  for (const auto& imp : imps) {
    if (imp.pairs == 0) {
      text << "  " << std::left << std::setw(static_cast<int>(width))
           << imp.baseline << "  n/a (baseline reached 0)\n";
      imp_json[imp.baseline] = nullptr;
      continue;
    }
    text << "  " << std::left << std::setw(static_cast<int>(width))
         << imp.baseline << "  mean " << short_number(100.0 * imp.mean)
         << "%  max " << short_number(100.0 * imp.max) << "%  min "
         << short_number(100.0 * imp.min) << "%\n";
    imp_json[imp.baseline] = {{"mean", imp.mean},
                              {"max", imp.max},
                              {"min", imp.min},
                              {"pairs", imp.pairs}};
  }
  try {
    write_artifacts(*p, *result, "compare");
    write_file(p->dir / "leaderboard.txt", text.str());
    write_file(p->dir / "improvement.json",
               json{{"candidate", first}, {"baselines", imp_json}}.dump(2) +
                   "\n");
  } catch (const std::exception& e) {
    err << "failed writing artifacts: " << e.what() << '\n';
    return 2;
  }
  out << text.str();
  return 0;
}

}  // namespace rghl::cli
