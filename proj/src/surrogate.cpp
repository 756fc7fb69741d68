#include "rghl/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "rghl/errors.hpp"

namespace rghl {

double predict(const Regressor& model, const Chromosome& c,
               const SearchSpace& space) {
  return model.predict(normalize(c, space));
}

LinearSurrogate::LinearSurrogate(std::vector<double> weights, double intercept,
                                 double ridge, std::size_t training_size)
    : weights_(std::move(weights)),
      intercept_(intercept),
      ridge_(ridge),
      training_size_(training_size) {}

double LinearSurrogate::predict(std::span<const double> features) const {
  double y = intercept_;
  const std::size_t n = std::min(features.size(), weights_.size());
  for (std::size_t i = 0; i < n; ++i) y += weights_[i] * features[i];
  return y;
}

nlohmann::json LinearSurrogate::to_json() const {
  return {{"kind", "linear"},
          {"weights", weights_},
          {"intercept", intercept_},
          {"ridge", ridge_},
          {"training_size", training_size_}};
}

KnnRegressor::KnnRegressor(std::vector<std::vector<double>> features,
                           std::vector<double> targets, std::size_t k)
    : features_(std::move(features)), targets_(std::move(targets)), k_(k) {
  if (features_.empty()) throw EmptyMemory("knn regressor needs training data");
  if (k_ == 0) throw ConfigError("knn k must be >= 1");
}

double KnnRegressor::predict(std::span<const double> x) const {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = features_[i][j] - x[j];
      d += diff * diff;
    }
    dist.emplace_back(d, i);
  }
  const std::size_t k = std::min(k_, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k),
                    dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += targets_[dist[i].second];
  return sum / static_cast<double>(k);
}

AffineFit fit_affine(const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, double ridge) {
  if (inputs.rows() == 0) throw EmptyMemory("no rows to fit");
  if (inputs.rows() != targets.rows()) {
    throw LengthMismatch("inputs and targets differ in row count");
  }
  const Eigen::RowVectorXd x_mean = inputs.colwise().mean();
  const Eigen::RowVectorXd y_mean = targets.colwise().mean();
  const Eigen::MatrixXd xc = inputs.rowwise() - x_mean;
  const Eigen::MatrixXd yc = targets.rowwise() - y_mean;
  const Eigen::MatrixXd gram = xc.transpose() * xc;

  auto condition = [&](double lambda) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += lambda;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        a, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
  };

  double lambda = std::max(ridge, 0.0);
  if (condition(lambda) > kMaxCondition) {
    lambda = std::max(lambda, kFallbackRidge);
  }

  Eigen::MatrixXd a = gram;
  a.diagonal().array() += lambda;
  AffineFit fit;
  fit.weights = a.ldlt().solve(xc.transpose() * yc);
  fit.intercept = (y_mean - x_mean * fit.weights).transpose();
  fit.ridge = lambda;
  return fit;
}

Eigen::MatrixXd feature_matrix(const ExperienceMemory& memory,
                               const SearchSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.n_genes());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(memory.size()), n);
  std::vector<double> row;
  for (std::size_t i = 0; i < memory.size(); ++i) {
    normalize_into(memory[i].chromosome, space, row);
    for (Eigen::Index j = 0; j < n; ++j) {
      x(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
    }
  }
  return x;
}

namespace {

Eigen::MatrixXd fitness_column(const ExperienceMemory& memory) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(memory.size()), 1);
  for (std::size_t i = 0; i < memory.size(); ++i) {
    y(static_cast<Eigen::Index>(i), 0) = memory[i].fitness;
  }
  return y;
}

Eigen::MatrixXd gene_matrix(const ExperienceMemory& memory,
                            std::size_t n_genes) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(memory.size()),
                    static_cast<Eigen::Index>(n_genes));
  for (std::size_t i = 0; i < memory.size(); ++i) {
    for (std::size_t j = 0; j < n_genes; ++j) {
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          memory[i].chromosome.genes[j];
    }
  }
  return g;
}

}  // namespace

LinearSurrogate train_linear(const ExperienceMemory& memory,
                             const SearchSpace& space, double ridge) {
  if (memory.empty()) throw EmptyMemory("cannot train on an empty memory");
  const auto fit =
      fit_affine(feature_matrix(memory, space), fitness_column(memory), ridge);
  std::vector<double> w(fit.weights.col(0).data(),
                        fit.weights.col(0).data() + fit.weights.rows());
  return LinearSurrogate(std::move(w), fit.intercept(0), fit.ridge,
                         memory.size());
}

KnnRegressor train_knn(const ExperienceMemory& memory,
                       const SearchSpace& space, std::size_t k) {
  if (memory.empty()) throw EmptyMemory("cannot train on an empty memory");
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  features.reserve(memory.size());
  for (const auto& r : memory.records()) {
    features.push_back(normalize(r.chromosome, space));
    targets.push_back(r.fitness);
  }
  return KnnRegressor(std::move(features), std::move(targets), k);
}

std::unique_ptr<Regressor> train_surrogate(const ExperienceMemory& memory,
                                           const SearchSpace& space,
                                           const SurrogateSpec& spec) {
  switch (spec.kind) {
    case SurrogateKind::linear:
      return std::make_unique<LinearSurrogate>(
          train_linear(memory, space, spec.ridge));
    case SurrogateKind::knn:
      return std::make_unique<KnnRegressor>(
          train_knn(memory, space, spec.knn_k));
  }
  throw UnsupportedKind("unknown surrogate kind");
}

void RhcConfig::validate() const {
  if (steps < 1) throw ConfigError("rhc steps must be >= 1");
  if (seeds < 1) throw ConfigError("rhc seeds must be >= 1");
  if (max_climb < 1) throw ConfigError("rhc max_climb must be >= 1");
}

namespace {

std::vector<int> random_direction(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> step(-1, 1);
  std::vector<int> d(n);
  for (int attempt = 0; attempt <= kZeroDirectionRedraws; ++attempt) {
    for (auto& x : d) x = step(rng);
    if (std::any_of(d.begin(), d.end(), [](int x) { return x != 0; })) break;
  }
  return d;
}

// h = u - d, clamped into the grid.
Chromosome climb(const Chromosome& u, std::span<const int> d,
                 const SearchSpace& space) {
  Chromosome h = u;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const long top = static_cast<long>(space.cardinality(i)) - 1;
    const long g = static_cast<long>(u.genes[i]) - d[i];
    h.genes[i] = static_cast<std::uint32_t>(std::clamp(g, 0L, top));
  }
  return h;
}

}  // namespace

RhcResult rhc_detailed(const Regressor& model, const SearchSpace& space,
                       std::span<const Chromosome> seeds, const RhcConfig& cfg,
                       Rng& rng) {
  cfg.validate();
  RhcResult out;
  struct Point {
    Chromosome c;
    double score;
  };
  std::vector<Point> accepted;
  std::set<Chromosome> seen;
  std::vector<double> features;

  auto score_of = [&](const Chromosome& c) {
    normalize_into(c, space, features);
    return model.predict(features);
  };

  for (std::size_t s = 0; s < seeds.size(); ++s) {
    space.validate(seeds[s]);
    Chromosome u = seeds[s];
    double incumbent = score_of(u);
    for (std::size_t j = 0; j < cfg.steps; ++j) {
      RhcWalk walk;
      walk.seed_index = s;
      walk.direction = random_direction(space.n_genes(), rng);
      walk.start_score = incumbent;
      while (walk.accepted_scores.size() < cfg.max_climb) {
        Chromosome h = climb(u, walk.direction, space);
        if (h == u) break;
        const double r = score_of(h);
        ++walk.predictions;
        if (!(r < incumbent)) break;
        incumbent = r;
        walk.accepted_scores.push_back(r);
        if (seen.insert(h).second) accepted.push_back({h, r});
        u = std::move(h);
      }
      out.walks.push_back(std::move(walk));
    }
  }

  std::stable_sort(accepted.begin(), accepted.end(),
                   [](const Point& a, const Point& b) {
                     return a.score < b.score;
                   });
  const std::size_t want = seeds.size();
  for (std::size_t i = 0; i < accepted.size() && out.candidates.size() < want;
       ++i) {
    out.candidates.push_back(accepted[i].c);
    out.predicted.push_back(accepted[i].score);
  }
  // Top up with seeds not already chosen, then with any seed.
  for (int pass = 0; pass < 2 && out.candidates.size() < want; ++pass) {
    for (const auto& seed : seeds) {
      if (out.candidates.size() >= want) break;
      const bool taken = std::find(out.candidates.begin(), out.candidates.end(),
                                   seed) != out.candidates.end();
      if (pass == 0 && taken) continue;
      out.candidates.push_back(seed);
      out.predicted.push_back(score_of(seed));
    }
  }
  return out;
}

std::vector<Chromosome> rhc(const Regressor& model, const SearchSpace& space,
                            std::span<const Chromosome> seeds,
                            const RhcConfig& cfg, Rng& rng) {
  return rhc_detailed(model, space, seeds, cfg, rng).candidates;
}

std::vector<Chromosome> best_distinct(const ExperienceMemory& memory,
                                      std::size_t count) {
  std::vector<std::size_t> order(memory.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (memory[a].fitness != memory[b].fitness) {
      return memory[a].fitness < memory[b].fitness;
    }
    return memory[a].eval_index > memory[b].eval_index;
  });
  std::vector<Chromosome> out;
  std::set<Chromosome> seen;
  for (auto i : order) {
    if (out.size() >= count) break;
    if (seen.insert(memory[i].chromosome).second) {
      out.push_back(memory[i].chromosome);
    }
  }
  return out;
}

std::vector<Chromosome> rhclm(const ExperienceMemory& memory,
                              const SearchSpace& space, const RhcConfig& cfg,
                              const SurrogateSpec& surrogate, Rng& rng) {
  if (memory.empty()) throw EmptyMemory("rhclm needs a non-empty memory");
  cfg.validate();
  const auto model = train_surrogate(memory, space, surrogate);
  const auto seeds = best_distinct(memory, cfg.seeds);
  return rhc(*model, space, seeds, cfg, rng);
}

std::vector<Chromosome> rhclm(const ExperienceMemory& memory,
                              const SearchSpace& space, const RhcConfig& cfg,
                              double ridge, Rng& rng) {
  return rhclm(memory, space, cfg,
               SurrogateSpec{SurrogateKind::linear, ridge, 5}, rng);
}

std::string to_string(ReversedMode m) {
  switch (m) {
    case ReversedMode::miso:
      return "MISO";
    case ReversedMode::simo:
      return "SIMO";
    case ReversedMode::mimo:
      return "MIMO";
  }
  return "unknown";
}

namespace {

Eigen::MatrixXd reversed_inputs(const ExperienceMemory& memory,
                                const SearchSpace& space, ReversedMode mode,
                                std::span<const double> identifiers) {
  const auto m = static_cast<Eigen::Index>(memory.size());
  switch (mode) {
    case ReversedMode::miso:
      return feature_matrix(memory, space);
    case ReversedMode::simo:
      return fitness_column(memory);
    case ReversedMode::mimo: {
      if (identifiers.size() != memory.size()) {
        throw LengthMismatch("MIMO needs one identifier per record");
      }
      Eigen::MatrixXd x(m, 2);
      x.col(0) = fitness_column(memory).col(0);
      for (Eigen::Index i = 0; i < m; ++i) {
        x(i, 1) = identifiers[static_cast<std::size_t>(i)];
      }
      return x;
    }
  }
  throw UnsupportedKind("unknown reversed mode");
}

}  // namespace

Eigen::MatrixXd reversed_design_matrix(const ExperienceMemory& memory,
                                       const SearchSpace& space,
                                       ReversedMode mode,
                                       std::span<const double> identifiers) {
  const Eigen::MatrixXd x = reversed_inputs(memory, space, mode, identifiers);
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  return design;
}

std::size_t matrix_rank(const Eigen::MatrixXd& m) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  return static_cast<std::size_t>(lu.rank());
}

ReversedSurrogate train_reversed(const ExperienceMemory& memory,
                                 const SearchSpace& space, ReversedMode mode,
                                 double ridge, Rng& rng) {
  if (memory.empty()) throw EmptyMemory("cannot train on an empty memory");
  ReversedSurrogate out;
  out.mode = mode;
  for (std::size_t i = 0; i < space.n_genes(); ++i) {
    out.cardinalities.push_back(space.cardinality(i));
  }

  if (mode == ReversedMode::mimo) {
    std::uniform_real_distribution<double> tau(0.0, 1.0);
    out.identifiers.reserve(memory.size());
    for (std::size_t i = 0; i < memory.size(); ++i) {
      out.identifiers.push_back(tau(rng));
    }
  }
  const Eigen::MatrixXd x =
      reversed_inputs(memory, space, mode, out.identifiers);

  Eigen::MatrixXd y;
  switch (mode) {
    case ReversedMode::miso:
      y = fitness_column(memory);
      break;
    case ReversedMode::simo:
      y = gene_matrix(memory, space.n_genes());
      break;
    case ReversedMode::mimo: {
      const auto n = static_cast<Eigen::Index>(space.n_genes());
      y.resize(x.rows(), n + 1);
      y.leftCols(n) = gene_matrix(memory, space.n_genes());
      y.col(n) = x.col(1);
      break;
    }
  }
  out.model = fit_affine(x, y, ridge);
  return out;
}

Chromosome query_reversed(const ReversedSurrogate& m, double target_score,
                          Rng& rng) {
  Eigen::RowVectorXd input;
  switch (m.mode) {
    case ReversedMode::miso:
      throw Error("a MISO surrogate maps genes to scores and cannot be queried "
                  "by score");
    case ReversedMode::simo:
      input.resize(1);
      input(0) = target_score;
      break;
    case ReversedMode::mimo: {
      std::uniform_real_distribution<double> tau(0.0, 1.0);
      input.resize(2);
      input(0) = target_score;
      input(1) = tau(rng);
      break;
    }
  }
  const Eigen::RowVectorXd out =
      input * m.model.weights + m.model.intercept.transpose();
  Chromosome c;
  c.genes.resize(m.cardinalities.size());
  for (std::size_t i = 0; i < m.cardinalities.size(); ++i) {
    const double top = static_cast<double>(m.cardinalities[i] - 1);
    double g = std::round(out(static_cast<Eigen::Index>(i)));
    if (!std::isfinite(g)) g = 0.0;
    c.genes[i] = static_cast<std::uint32_t>(std::clamp(g, 0.0, top));
  }
  return c;
}

}  // namespace rghl
