#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "abopt/learners.hpp"
#include "abopt/rng.hpp"

namespace abopt {

// With-replacement resample of the validation set, stored as per-example
// counts summing to m. Count form keeps the resample O(m) and exact.
struct BootstrapWeights {
  std::vector<int> counts;

  int total() const;
};

BootstrapWeights draw_bootstrap(int m, Rng& rng);
BootstrapWeights draw_bootstrap(int m, std::uint64_t seed);
BootstrapWeights uniform_weights(int m);  // all ones: the identity resample

// Per-example losses; rows are predictors, columns validation examples.
struct LossMatrix {
  Eigen::MatrixXd losses;

  int num_predictors() const { return static_cast<int>(losses.rows()); }
  int num_examples() const { return static_cast<int>(losses.cols()); }

  void save_csv(const std::string& path) const;
  static LossMatrix load_csv(const std::string& path);
};

// Empirical risk on the resample: sum_i counts[i] * loss[i] / m. With all-ones
// counts this is bitwise the plain mean (mean_loss) of the row.
double weighted_risk(const Eigen::VectorXd& loss_row, const BootstrapWeights& weights);

// One posterior sample of the best predictor: draws a bootstrap resample and
// returns the row index with minimal resampled risk. Exact risk ties are
// broken uniformly at random from the same stream.
int sample_best(const LossMatrix& loss_matrix, Rng& rng);
int sample_best(const LossMatrix& loss_matrix, std::uint64_t seed);

struct BestPosterior {
  Eigen::VectorXd probs;
  long n_samples = 0;
};

// Monte Carlo estimate of the probability that each predictor is the true
// risk minimizer: win counts of sample_best over n_samples draws with
// per-sample derived seeds.
BestPosterior estimate_best_posterior(const LossMatrix& loss_matrix, long n_samples,
                                      std::uint64_t seed);

enum class TaskKind { classification, regression };

// Weighted predictor collection implementing the agnostic-Bayes decision
// rules: weighted plurality vote for classification, weight-normalized mean
// for regression.
struct Ensemble {
  struct Member {
    PredictorPtr predictor;
    double weight = 0.0;
  };
  std::vector<Member> members;
  TaskKind task_kind = TaskKind::regression;
};

// Label with the largest total weight of agreeing members; ties go to the
// smallest label. Throws std::invalid_argument on an empty ensemble.
double ensemble_predict_classification(const Ensemble& ensemble,
                                       const Eigen::VectorXd& x);
double ensemble_predict_regression(const Ensemble& ensemble, const Eigen::VectorXd& x);
double ensemble_predict(const Ensemble& ensemble, const Eigen::VectorXd& x);

// Bootstrap-weighted overload of empirical_risk; the unweighted form equals
// this with uniform_weights.
double empirical_risk(const Predictor& predictor, const Dataset& dataset, Split split,
                      LossKind loss, const BootstrapWeights& weights);

}  // namespace abopt
