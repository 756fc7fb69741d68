#pragma once

// Exploitation strategy: surrogate regressors trained on the experience
// memory and the random-direction hill-climbing acquisition that walks the
// surrogate landscape from the best known individuals.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "rghl/experience.hpp"
#include "rghl/genetic.hpp"
#include "rghl/search_space.hpp"

namespace rghl {

inline constexpr double kDefaultRidge = 1e-8;
// Ridge used when the regularized normal matrix is numerically singular.
inline constexpr double kFallbackRidge = 1e-4;
inline constexpr double kMaxCondition = 1e12;

// Predicts fitness from normalized chromosome features.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual double predict(std::span<const double> features) const = 0;
  virtual std::string name() const = 0;
};

double predict(const Regressor& model, const Chromosome& c,
               const SearchSpace& space);

class LinearSurrogate final : public Regressor {
 public:
  LinearSurrogate() = default;
  LinearSurrogate(std::vector<double> weights, double intercept, double ridge,
                  std::size_t training_size);

  double predict(std::span<const double> features) const override;
  std::string name() const override { return "linear"; }

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  // Effective ridge after any singularity fallback.
  double ridge() const { return ridge_; }
  std::size_t training_size() const { return training_size_; }
  // Fewer records than n_genes + 1: the fit leans on the ridge term.
  bool underdetermined() const {
    return training_size_ < weights_.size() + 1;
  }

  nlohmann::json to_json() const;

  friend bool operator==(const LinearSurrogate&,
                         const LinearSurrogate&) = default;

 private:
  std::vector<double> weights_;
  double intercept_ = 0.0;
  double ridge_ = kDefaultRidge;
  std::size_t training_size_ = 0;
};

// Mean fitness of the k nearest memory records in normalized feature space.
class KnnRegressor final : public Regressor {
 public:
  KnnRegressor(std::vector<std::vector<double>> features,
               std::vector<double> targets, std::size_t k);

  double predict(std::span<const double> features) const override;
  std::string name() const override { return "knn"; }

 private:
  std::vector<std::vector<double>> features_;
  std::vector<double> targets_;
  std::size_t k_;
};

// Multi-output ridge regression with an unpenalized intercept.
// Row i of `inputs` maps to row i of `targets`.
struct AffineFit {
  Eigen::MatrixXd weights;    // inputs.cols() x targets.cols()
  Eigen::VectorXd intercept;  // targets.cols()
  double ridge = kDefaultRidge;
};

AffineFit fit_affine(const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, double ridge);

// Normalized chromosomes as rows.
Eigen::MatrixXd feature_matrix(const ExperienceMemory& memory,
                               const SearchSpace& space);

// Throws EmptyMemory.
LinearSurrogate train_linear(const ExperienceMemory& memory,
                             const SearchSpace& space,
                             double ridge = kDefaultRidge);

KnnRegressor train_knn(const ExperienceMemory& memory,
                       const SearchSpace& space, std::size_t k);

enum class SurrogateKind { linear, knn };

struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::linear;
  double ridge = kDefaultRidge;
  std::size_t knn_k = 5;
};

std::unique_ptr<Regressor> train_surrogate(const ExperienceMemory& memory,
                                           const SearchSpace& space,
                                           const SurrogateSpec& spec);

struct RhcConfig {
  std::size_t steps = 16;     // random directions per seed
  std::size_t seeds = 10;     // best individuals used as starting points
  std::size_t max_climb = 64; // accepted moves per direction

  void validate() const;
};

inline constexpr int kZeroDirectionRedraws = 8;

struct RhcWalk {
  std::size_t seed_index = 0;
  std::vector<int> direction;
  double start_score = 0.0;
  std::vector<double> accepted_scores;
  std::size_t predictions = 0;
};

struct RhcResult {
  std::vector<Chromosome> candidates;
  std::vector<double> predicted;
  std::vector<RhcWalk> walks;
};

// Random-direction hill climbing on `model`. Each seed climbs along
// cfg.steps random {-1, 0, 1} directions in turn, continuing from wherever
// the previous direction stopped. A move h = u - d (clamped into the grid)
// is accepted while it strictly lowers the predicted score. Returns the
// seeds.size() best distinct accepted points, topped up with the seeds
// themselves when fewer points were accepted.
RhcResult rhc_detailed(const Regressor& model, const SearchSpace& space,
                       std::span<const Chromosome> seeds, const RhcConfig& cfg,
                       Rng& rng);

std::vector<Chromosome> rhc(const Regressor& model, const SearchSpace& space,
                            std::span<const Chromosome> seeds,
                            const RhcConfig& cfg, Rng& rng);

// cfg.seeds lowest-fitness distinct chromosomes, most recent first on ties.
std::vector<Chromosome> best_distinct(const ExperienceMemory& memory,
                                      std::size_t count);

// Train on the memory, seed with its best individuals, climb.
// Throws EmptyMemory.
std::vector<Chromosome> rhclm(const ExperienceMemory& memory,
                              const SearchSpace& space, const RhcConfig& cfg,
                              const SurrogateSpec& surrogate, Rng& rng);

std::vector<Chromosome> rhclm(const ExperienceMemory& memory,
                              const SearchSpace& space, const RhcConfig& cfg,
                              double ridge, Rng& rng);

// Forward (genes -> score) and reversed (score -> genes) surrogate arities.
enum class ReversedMode { miso, simo, mimo };

std::string to_string(ReversedMode m);

struct ReversedSurrogate {
  ReversedMode mode = ReversedMode::simo;
  AffineFit model;
  // One tau ~ U(0, 1) per training record, MIMO only.
  std::vector<double> identifiers;
  std::vector<std::size_t> cardinalities;

  std::size_t input_dim() const { return model.weights.rows(); }
  std::size_t output_dim() const { return model.weights.cols(); }
};

// Design matrix (with a leading intercept column) of the regression each
// mode solves. MISO rows are [1, features], SIMO rows [1, score], MIMO rows
// [1, score, tau].
Eigen::MatrixXd reversed_design_matrix(const ExperienceMemory& memory,
                                       const SearchSpace& space,
                                       ReversedMode mode,
                                       std::span<const double> identifiers);

std::size_t matrix_rank(const Eigen::MatrixXd& m);

// Throws EmptyMemory.
ReversedSurrogate train_reversed(const ExperienceMemory& memory,
                                 const SearchSpace& space, ReversedMode mode,
                                 double ridge, Rng& rng);

// Evaluates a reversed model at the target score (plus a fresh tau for
// MIMO) and rounds each gene output to the nearest grid index.
// MISO models are forward-only and throw Error.
Chromosome query_reversed(const ReversedSurrogate& m, double target_score,
                          Rng& rng);

}  // namespace rghl
