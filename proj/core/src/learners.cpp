#include "abopt/learners.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "abopt/errors.hpp"
#include "abopt/rng.hpp"

namespace abopt {
namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& X, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& y, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(idx[i]);
  return out;
}

class RidgePredictor final : public Predictor {
 public:
  RidgePredictor(HyperParamConfig config, Eigen::VectorXd weights, double intercept)
      : Predictor("ridge", std::move(config)),
        weights_(std::move(weights)),
        intercept_(intercept) {}

  double predict(const Eigen::VectorXd& x) const override {
    return intercept_ + weights_.dot(x);
  }

 private:
  Eigen::VectorXd weights_;
  double intercept_;
};

class KernelRidgePredictor final : public Predictor {
 public:
  KernelRidgePredictor(HyperParamConfig config, Eigen::MatrixXd X_std,
                       Eigen::VectorXd alphas, double intercept, double gamma,
                       Eigen::VectorXd feat_mean, Eigen::VectorXd feat_scale)
      : Predictor("kernel_ridge", std::move(config)),
        X_std_(std::move(X_std)),
        alphas_(std::move(alphas)),
        intercept_(intercept),
        gamma_(gamma),
        feat_mean_(std::move(feat_mean)),
        feat_scale_(std::move(feat_scale)) {}

  double predict(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd xs = (x - feat_mean_).cwiseQuotient(feat_scale_);
    double out = intercept_;
    for (Eigen::Index i = 0; i < X_std_.rows(); ++i) {
      const double d2 = (X_std_.row(i).transpose() - xs).squaredNorm();
      out += alphas_(i) * std::exp(-gamma_ * d2);
    }
    return out;
  }

 private:
  Eigen::MatrixXd X_std_;
  Eigen::VectorXd alphas_;
  double intercept_;
  double gamma_;
  Eigen::VectorXd feat_mean_;
  Eigen::VectorXd feat_scale_;
};

class KnnPredictor final : public Predictor {
 public:
  KnnPredictor(HyperParamConfig config, Eigen::MatrixXd X, Eigen::VectorXd y,
               int k, bool classification)
      : Predictor("knn", std::move(config)),
        X_(std::move(X)),
        y_(std::move(y)),
        k_(k),
        classification_(classification) {}

  double predict(const Eigen::VectorXd& x) const override {
    const Eigen::Index n = X_.rows();
    std::vector<std::pair<double, Eigen::Index>> by_dist;
    by_dist.reserve(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      by_dist.emplace_back((X_.row(i).transpose() - x).squaredNorm(), i);
    }
    // Full sort with index tie-break keeps neighbor selection deterministic.
    std::sort(by_dist.begin(), by_dist.end());
    const int k = std::min<int>(k_, static_cast<int>(n));
    if (classification_) {
      std::map<long, int> votes;
      for (int i = 0; i < k; ++i) {
        votes[std::lround(y_(by_dist[static_cast<size_t>(i)].second))] += 1;
      }
      long best_label = votes.begin()->first;
      int best_votes = votes.begin()->second;
      for (const auto& [label, count] : votes) {
        if (count > best_votes) {  // ties keep the smallest label
          best_votes = count;
          best_label = label;
        }
      }
      return static_cast<double>(best_label);
    }
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += y_(by_dist[static_cast<size_t>(i)].second);
    return sum / static_cast<double>(k);
  }

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  int k_;
  bool classification_;
};

class SyntheticPredictor final : public Predictor {
 public:
  SyntheticPredictor(HyperParamConfig config, double value)
      : Predictor("synthetic", std::move(config)), value_(value) {}
  double predict(const Eigen::VectorXd&) const override { return value_; }

 private:
  double value_;
};

void validate_dataset(const Dataset& ds) {
  if (ds.train_idx.empty() || ds.valid_idx.empty() || ds.test_idx.empty()) {
    throw std::invalid_argument("Dataset: empty split");
  }
  for (int i : ds.train_idx) {
    if (std::find(ds.valid_idx.begin(), ds.valid_idx.end(), i) != ds.valid_idx.end()) {
      throw std::invalid_argument("Dataset: train/validation splits overlap");
    }
  }
}

Dataset assemble(Eigen::MatrixXd X, Eigen::VectorXd y, int n_train, int n_valid,
                 int n_test, bool classification) {
  Dataset ds;
  ds.X = std::move(X);
  ds.y = std::move(y);
  ds.classification = classification;
  ds.train_idx.resize(static_cast<size_t>(n_train));
  ds.valid_idx.resize(static_cast<size_t>(n_valid));
  ds.test_idx.resize(static_cast<size_t>(n_test));
  for (int i = 0; i < n_train; ++i) ds.train_idx[static_cast<size_t>(i)] = i;
  for (int i = 0; i < n_valid; ++i) ds.valid_idx[static_cast<size_t>(i)] = n_train + i;
  for (int i = 0; i < n_test; ++i) ds.test_idx[static_cast<size_t>(i)] = n_train + n_valid + i;
  validate_dataset(ds);
  return ds;
}

PredictorPtr train_ridge(const Dataset& ds, const HyperParamConfig& config) {
  const double lambda = config.values.at(0);
  const Eigen::MatrixXd Xt = gather_rows(ds.X, ds.train_idx);
  const Eigen::VectorXd yt = gather(ds.y, ds.train_idx);
  const Eigen::RowVectorXd x_mean = Xt.colwise().mean();
  const double y_mean = yt.mean();
  const Eigen::MatrixXd Xc = Xt.rowwise() - x_mean;
  const Eigen::VectorXd yc = yt.array() - y_mean;

  Eigen::MatrixXd G = Xc.transpose() * Xc;
  G.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success) {
    throw TrainingError("ridge: normal equations not factorizable");
  }
  Eigen::VectorXd w = ldlt.solve(Xc.transpose() * yc);
  if (!w.allFinite()) throw TrainingError("ridge: non-finite solution");
  const double intercept = y_mean - w.dot(x_mean.transpose());
  return std::make_shared<RidgePredictor>(config, std::move(w), intercept);
}

PredictorPtr train_kernel_ridge(const Dataset& ds, const HyperParamConfig& config) {
  const double lambda = config.values.at(0);
  const double gamma = config.values.at(1);
  const Eigen::MatrixXd Xt = gather_rows(ds.X, ds.train_idx);
  const Eigen::VectorXd yt = gather(ds.y, ds.train_idx);

  // Train-split standardization keeps the width hyperparameter comparable
  // across datasets.
  const Eigen::VectorXd mean = Xt.colwise().mean().transpose();
  Eigen::VectorXd scale(Xt.cols());
  for (Eigen::Index j = 0; j < Xt.cols(); ++j) {
    const double sd = std::sqrt((Xt.col(j).array() - mean(j)).square().mean());
    scale(j) = sd > 1e-12 ? sd : 1.0;
  }
  Eigen::MatrixXd Xs = (Xt.rowwise() - mean.transpose());
  Xs = Xs * scale.cwiseInverse().asDiagonal();

  const Eigen::Index n = Xs.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d2 = (Xs.row(i) - Xs.row(j)).squaredNorm();
      K(i, j) = K(j, i) = std::exp(-gamma * d2);
    }
  }
  K.diagonal().array() += lambda;

  const double y_mean = yt.mean();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
  if (ldlt.info() != Eigen::Success) {
    throw TrainingError("kernel_ridge: Gram matrix not factorizable");
  }
  Eigen::VectorXd alphas = ldlt.solve(Eigen::VectorXd(yt.array() - y_mean));
  if (!alphas.allFinite()) throw TrainingError("kernel_ridge: non-finite solution");
  return std::make_shared<KernelRidgePredictor>(config, std::move(Xs),
                                                std::move(alphas), y_mean, gamma,
                                                mean, scale);
}

PredictorPtr train_knn(const Dataset& ds, const HyperParamConfig& config) {
  const int k = static_cast<int>(config.values.at(0));
  if (k < 1) throw TrainingError("knn: k must be >= 1");
  return std::make_shared<KnnPredictor>(config, gather_rows(ds.X, ds.train_idx),
                                        gather(ds.y, ds.train_idx), k,
                                        ds.classification);
}

double branin(double x1, double x2) {
  constexpr double a = 1.0;
  const double b = 5.1 / (4.0 * std::numbers::pi * std::numbers::pi);
  const double c = 5.0 / std::numbers::pi;
  constexpr double r = 6.0;
  constexpr double s = 10.0;
  const double t = 1.0 / (8.0 * std::numbers::pi);
  const double inner = x2 - b * x1 * x1 + c * x1 - r;
  return a * inner * inner + s * (1.0 - t) * std::cos(x1) + s;
}

}  // namespace

double loss_value(LossKind kind, double prediction, double target) {
  if (kind == LossKind::zero_one) {
    return std::lround(prediction) == std::lround(target) ? 0.0 : 1.0;
  }
  const double diff = prediction - target;
  return diff * diff;
}

struct TuningProblem::Impl {
  std::string id;
  std::string algorithm;  // "ridge", "kernel_ridge", "knn" or "synthetic"
  std::string objective;  // synthetic only
  HyperParamSpace space;
  Dataset dataset;
  LossKind loss = LossKind::squared;
  bool is_synthetic = false;
  mutable std::atomic<long> train_count{0};
};

TuningProblem TuningProblem::learner(std::string id, std::string algorithm,
                                     Dataset dataset, LossKind loss) {
  auto impl = std::make_shared<Impl>();
  impl->id = std::move(id);
  impl->algorithm = std::move(algorithm);
  impl->space = algorithm_space(impl->algorithm);
  validate_dataset(dataset);
  impl->dataset = std::move(dataset);
  impl->loss = loss;
  if (loss == LossKind::zero_one && !impl->dataset.classification) {
    throw ConfigError("zero_one loss requires a classification dataset");
  }
  return TuningProblem(std::move(impl));
}

TuningProblem TuningProblem::synthetic(std::string id, std::string objective) {
  auto impl = std::make_shared<Impl>();
  impl->id = std::move(id);
  impl->algorithm = "synthetic";
  impl->objective = std::move(objective);
  impl->space = synthetic_space(impl->objective);
  impl->loss = LossKind::squared;
  impl->is_synthetic = true;
  return TuningProblem(std::move(impl));
}

const std::string& TuningProblem::id() const { return impl_->id; }
const std::string& TuningProblem::algorithm() const { return impl_->algorithm; }
const HyperParamSpace& TuningProblem::space() const { return impl_->space; }
LossKind TuningProblem::loss() const { return impl_->loss; }
bool TuningProblem::is_synthetic() const { return impl_->is_synthetic; }

const Dataset& TuningProblem::dataset() const {
  if (impl_->is_synthetic) {
    throw std::logic_error("dataset(): synthetic problem has no dataset");
  }
  return impl_->dataset;
}

int TuningProblem::validation_size() const {
  return impl_->is_synthetic ? 1 : static_cast<int>(impl_->dataset.valid_idx.size());
}

long TuningProblem::training_count() const { return impl_->train_count.load(); }

EvalOutcome TuningProblem::evaluate(const HyperParamConfig& config) const {
  EvalOutcome out;
  out.config = config;
  if (impl_->is_synthetic) {
    impl_->train_count.fetch_add(1);
    const double risk = synthetic_objective(impl_->objective, config);
    out.valid_risk = risk;
    out.valid_losses = Eigen::VectorXd::Constant(1, risk);
    out.test_losses = Eigen::VectorXd::Constant(1, risk);
    out.test_predictions = Eigen::VectorXd::Constant(1, risk);
    out.predictor = std::make_shared<SyntheticPredictor>(config, risk);
    return out;
  }
  try {
    out.predictor = train(*this, config);
  } catch (const TrainingError&) {
    out.failed = true;
    out.valid_risk = std::numeric_limits<double>::infinity();
    return out;
  }
  out.valid_losses =
      example_losses(*out.predictor, impl_->dataset, Split::validation, impl_->loss);
  out.valid_risk = mean_loss(out.valid_losses);
  out.test_predictions =
      example_predictions(*out.predictor, impl_->dataset, Split::test);
  const std::vector<int>& test_idx = impl_->dataset.test_idx;
  out.test_losses.resize(static_cast<Eigen::Index>(test_idx.size()));
  for (size_t i = 0; i < test_idx.size(); ++i) {
    out.test_losses(static_cast<Eigen::Index>(i)) =
        loss_value(impl_->loss, out.test_predictions(static_cast<Eigen::Index>(i)),
                   impl_->dataset.y(test_idx[i]));
  }
  return out;
}

PredictorPtr train(const TuningProblem& problem, const HyperParamConfig& config) {
  // Count every training attempt, including ones that fail below.
  problem.impl_->train_count.fetch_add(1);
  if (problem.is_synthetic()) {
    return std::make_shared<SyntheticPredictor>(
        config, synthetic_objective(problem.impl_->objective, config));
  }
  const std::string& algorithm = problem.algorithm();
  if (algorithm == "ridge") return train_ridge(problem.dataset(), config);
  if (algorithm == "kernel_ridge") return train_kernel_ridge(problem.dataset(), config);
  if (algorithm == "knn") return train_knn(problem.dataset(), config);
  throw ConfigError("unknown algorithm: " + algorithm);
}

Eigen::VectorXd example_predictions(const Predictor& predictor,
                                    const Dataset& dataset, Split split) {
  const std::vector<int>& idx = dataset.split(split);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        predictor.predict(dataset.X.row(idx[i]).transpose());
  }
  return out;
}

Eigen::VectorXd example_losses(const Predictor& predictor, const Dataset& dataset,
                               Split split, LossKind loss) {
  const std::vector<int>& idx = dataset.split(split);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) {
    const double pred = predictor.predict(dataset.X.row(idx[i]).transpose());
    out(static_cast<Eigen::Index>(i)) = loss_value(loss, pred, dataset.y(idx[i]));
  }
  return out;
}

double mean_loss(const Eigen::VectorXd& losses) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < losses.size(); ++i) sum += losses(i);
  return sum / static_cast<double>(losses.size());
}

double empirical_risk(const Predictor& predictor, const Dataset& dataset,
                      Split split, LossKind loss) {
  return mean_loss(example_losses(predictor, dataset, split, loss));
}

double synthetic_objective(const std::string& name, const HyperParamConfig& config) {
  if (name == "branin") {
    return branin(config.values.at(0), config.values.at(1));
  }
  if (name == "quadratic_1d") {
    const double x = config.values.at(0);
    return 0.5 + (x - 0.3) * (x - 0.3);
  }
  if (name == "styblinski_2d") {
    double sum = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double v = config.values.at(static_cast<size_t>(j));
      sum += v * v * v * v - 16.0 * v * v + 5.0 * v;
    }
    return 0.5 * sum;
  }
  throw ConfigError("unknown synthetic objective: " + name);
}

HyperParamSpace synthetic_space(const std::string& name) {
  if (name == "branin") {
    return HyperParamSpace({{"x1", DimKind::continuous, DimScale::linear, -5.0, 10.0},
                            {"x2", DimKind::continuous, DimScale::linear, 0.0, 15.0}});
  }
  if (name == "quadratic_1d") {
    return HyperParamSpace({{"x", DimKind::continuous, DimScale::linear, -1.0, 2.0}});
  }
  if (name == "styblinski_2d") {
    return HyperParamSpace({{"x1", DimKind::continuous, DimScale::linear, -5.0, 5.0},
                            {"x2", DimKind::continuous, DimScale::linear, -5.0, 5.0}});
  }
  throw ConfigError("unknown synthetic objective: " + name);
}

HyperParamSpace algorithm_space(const std::string& algorithm) {
  if (algorithm == "ridge") {
    return HyperParamSpace({{"lambda", DimKind::continuous, DimScale::log, 1e-5, 1e3}});
  }
  if (algorithm == "kernel_ridge") {
    return HyperParamSpace({{"lambda", DimKind::continuous, DimScale::log, 1e-5, 1e3},
                            {"width", DimKind::continuous, DimScale::log, 1e-5, 1e3}});
  }
  if (algorithm == "knn") {
    return HyperParamSpace({{"k", DimKind::integer, DimScale::linear, 1.0, 50.0}});
  }
  throw ConfigError("unknown algorithm: " + algorithm);
}

Dataset make_linear_dataset(std::uint64_t seed, int n_train, int n_valid, int n_test,
                            int n_features, double noise) {
  Rng rng(derive_seed(seed, 0x11EA));
  const int n = n_train + n_valid + n_test;
  Eigen::MatrixXd X(n, n_features);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng.gaussian();
  Eigen::VectorXd beta(n_features);
  for (int j = 0; j < n_features; ++j) beta(j) = rng.gaussian();
  Eigen::VectorXd y = X * beta;
  for (int i = 0; i < n; ++i) y(i) += noise * rng.gaussian();
  return assemble(std::move(X), std::move(y), n_train, n_valid, n_test, false);
}

Dataset make_friedman_dataset(std::uint64_t seed, int n_train, int n_valid,
                              int n_test, int n_features, double noise) {
  if (n_features < 5) throw std::invalid_argument("friedman needs >= 5 features");
  Rng rng(derive_seed(seed, 0xF21E));
  const int n = n_train + n_valid + n_test;
  Eigen::MatrixXd X(n, n_features);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng.uniform01();
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = 10.0 * std::sin(std::numbers::pi * X(i, 0) * X(i, 1)) +
           20.0 * (X(i, 2) - 0.5) * (X(i, 2) - 0.5) + 10.0 * X(i, 3) +
           5.0 * X(i, 4) + noise * rng.gaussian();
  }
  return assemble(std::move(X), std::move(y), n_train, n_valid, n_test, false);
}

Dataset make_two_gaussians_dataset(std::uint64_t seed, int n_train, int n_valid,
                                   int n_test, int n_features, double separation) {
  Rng rng(derive_seed(seed, 0x2A55));
  const int n = n_train + n_valid + n_test;
  const double offset = 0.5 * separation / std::sqrt(static_cast<double>(n_features));
  Eigen::MatrixXd X(n, n_features);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const long label = rng.uniform_int(0, 1);
    y(i) = static_cast<double>(label);
    const double center = label == 1 ? offset : -offset;
    for (int j = 0; j < n_features; ++j) X(i, j) = center + rng.gaussian();
  }
  return assemble(std::move(X), std::move(y), n_train, n_valid, n_test, true);
}

Dataset load_csv_dataset(const std::string& path, bool classification,
                         std::uint64_t split_seed, double train_fraction,
                         double valid_fraction) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV dataset: " + path);

  std::vector<std::vector<double>> rows;
  size_t n_cols = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("non-numeric CSV cell '" + cell + "' in " + path);
      }
    }
    if (n_cols == 0) n_cols = row.size();
    if (row.size() != n_cols || n_cols < 2) {
      throw ConfigError("ragged or too-narrow CSV row in " + path);
    }
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n < 3) throw ConfigError("CSV dataset needs at least 3 rows: " + path);

  Dataset ds;
  ds.classification = classification;
  ds.X.resize(n, static_cast<Eigen::Index>(n_cols - 1));
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (size_t j = 0; j + 1 < n_cols; ++j) {
      ds.X(i, static_cast<Eigen::Index>(j)) = rows[static_cast<size_t>(i)][j];
    }
    const double target = rows[static_cast<size_t>(i)][n_cols - 1];
    if (classification && target != std::floor(target)) {
      throw ConfigError("classification CSV target is not an integer in " + path);
    }
    ds.y(i) = target;
  }

  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  Rng rng(derive_seed(split_seed, 0xC5F));
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<size_t>(rng.uniform_int(0, i));
    std::swap(order[static_cast<size_t>(i)], order[j]);
  }
  const int n_train = std::max(1, static_cast<int>(train_fraction * n));
  const int n_valid = std::max(1, static_cast<int>(valid_fraction * n));
  if (n_train + n_valid >= n) {
    throw ConfigError("CSV split fractions leave no test rows: " + path);
  }
  ds.train_idx.assign(order.begin(), order.begin() + n_train);
  ds.valid_idx.assign(order.begin() + n_train, order.begin() + n_train + n_valid);
  ds.test_idx.assign(order.begin() + n_train + n_valid, order.end());
  validate_dataset(ds);
  return ds;
}

}  // namespace abopt
