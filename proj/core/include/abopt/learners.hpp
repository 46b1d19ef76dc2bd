#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "abopt/space.hpp"

namespace abopt {

enum class LossKind { zero_one, squared };
enum class Split { train, validation, test };

double loss_value(LossKind kind, double prediction, double target);

// Row-major example matrix with index-based split roles. Splits are disjoint
// and non-empty.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<int> train_idx;
  std::vector<int> valid_idx;
  std::vector<int> test_idx;
  bool classification = false;

  const std::vector<int>& split(Split s) const {
    switch (s) {
      case Split::train: return train_idx;
      case Split::validation: return valid_idx;
      default: return test_idx;
    }
  }
};

// A trained model. Prediction is deterministic given the trained state;
// classifiers return integer labels stored as doubles.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(const Eigen::VectorXd& x) const = 0;

  const std::string& algorithm() const { return algorithm_; }
  const HyperParamConfig& config() const { return config_; }

 protected:
  Predictor(std::string algorithm, HyperParamConfig config)
      : algorithm_(std::move(algorithm)), config_(std::move(config)) {}

 private:
  std::string algorithm_;
  HyperParamConfig config_;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

struct EvalOutcome {
  HyperParamConfig config;
  bool failed = false;
  double valid_risk = 0.0;
  Eigen::VectorXd valid_losses;
  Eigen::VectorXd test_losses;
  Eigen::VectorXd test_predictions;
  PredictorPtr predictor;
};

// One tunable task: a learning algorithm with its hyperparameter space, data
// and loss, or a pure synthetic objective. Value-semantic handle; the training
// counter is shared across copies and atomic.
class TuningProblem {
 public:
  static TuningProblem learner(std::string id, std::string algorithm,
                               Dataset dataset, LossKind loss);
  static TuningProblem synthetic(std::string id, std::string objective);

  const std::string& id() const;
  const std::string& algorithm() const;
  const HyperParamSpace& space() const;
  LossKind loss() const;
  bool is_synthetic() const;
  const Dataset& dataset() const;  // learner problems only
  int validation_size() const;     // 1 for synthetic problems

  // Trains (or evaluates the synthetic objective), computes per-example
  // validation and test losses, and bumps the training counter. A learner
  // training failure yields failed = true with valid_risk = +inf.
  EvalOutcome evaluate(const HyperParamConfig& config) const;

  long training_count() const;

 private:
  struct Impl;
  explicit TuningProblem(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  friend PredictorPtr train(const TuningProblem&, const HyperParamConfig&);
  std::shared_ptr<Impl> impl_;
};

// Trains the problem's algorithm at the given configuration. Counts toward the
// problem's training counter. Throws TrainingError when the underlying linear
// system is singular beyond regularization.
PredictorPtr train(const TuningProblem& problem, const HyperParamConfig& config);

// Per-example predictions/losses of a predictor over one split, in split order.
Eigen::VectorXd example_predictions(const Predictor& predictor,
                                    const Dataset& dataset, Split split);
Eigen::VectorXd example_losses(const Predictor& predictor, const Dataset& dataset,
                               Split split, LossKind loss);

// Plain mean of per-example losses. See agnostic.hpp for the bootstrap-weighted
// overload; the two agree bitwise for all-ones weights.
double empirical_risk(const Predictor& predictor, const Dataset& dataset,
                      Split split, LossKind loss);
double mean_loss(const Eigen::VectorXd& losses);

// Built-in black-box test objectives: "branin", "quadratic_1d",
// "styblinski_2d".
double synthetic_objective(const std::string& name, const HyperParamConfig& config);
HyperParamSpace synthetic_space(const std::string& name);

// Hyperparameter spaces of the shipped algorithms: "ridge" (log lambda),
// "kernel_ridge" (log lambda, log width) and "knn" (integer k).
HyperParamSpace algorithm_space(const std::string& algorithm);

// Seeded synthetic dataset generators with disjoint splits.
Dataset make_linear_dataset(std::uint64_t seed, int n_train = 100, int n_valid = 100,
                            int n_test = 300, int n_features = 8,
                            double noise = 0.5);
Dataset make_friedman_dataset(std::uint64_t seed, int n_train = 100,
                              int n_valid = 100, int n_test = 300,
                              int n_features = 10, double noise = 1.0);
Dataset make_two_gaussians_dataset(std::uint64_t seed, int n_train = 100,
                                   int n_valid = 100, int n_test = 300,
                                   int n_features = 4, double separation = 2.0);

// CSV ingestion: comma-separated, header row, last column is the target;
// classification targets must be integers. Rows are shuffled with the split
// seed and cut by the given fractions (remainder goes to test).
Dataset load_csv_dataset(const std::string& path, bool classification,
                         std::uint64_t split_seed, double train_fraction = 0.4,
                         double valid_fraction = 0.3);

}  // namespace abopt
