#include "abopt/agnostic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "abopt/errors.hpp"

namespace abopt {

int BootstrapWeights::total() const {
  int sum = 0;
  for (int c : counts) sum += c;
  return sum;
}

BootstrapWeights draw_bootstrap(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("draw_bootstrap: m must be >= 1");
  BootstrapWeights w;
  w.counts.assign(static_cast<size_t>(m), 0);
  for (int i = 0; i < m; ++i) {
    w.counts[static_cast<size_t>(rng.uniform_int(0, m - 1))] += 1;
  }
  return w;
}

BootstrapWeights draw_bootstrap(int m, std::uint64_t seed) {
  Rng rng(seed);
  return draw_bootstrap(m, rng);
}

BootstrapWeights uniform_weights(int m) {
  if (m < 1) throw std::invalid_argument("uniform_weights: m must be >= 1");
  BootstrapWeights w;
  w.counts.assign(static_cast<size_t>(m), 1);
  return w;
}

double weighted_risk(const Eigen::VectorXd& loss_row, const BootstrapWeights& weights) {
  const auto m = static_cast<size_t>(loss_row.size());
  if (weights.counts.size() != m) {
    throw std::invalid_argument("weighted_risk: loss/weights length mismatch");
  }
  double sum = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sum += static_cast<double>(weights.counts[i]) * loss_row(static_cast<Eigen::Index>(i));
  }
  return sum / static_cast<double>(m);
}

namespace {

int argmin_with_random_ties(const Eigen::VectorXd& risks, Rng& rng) {
  double best = risks(0);
  for (Eigen::Index g = 1; g < risks.size(); ++g) best = std::min(best, risks(g));
  int n_ties = 0;
  for (Eigen::Index g = 0; g < risks.size(); ++g) {
    if (risks(g) == best) ++n_ties;
  }
  if (n_ties == 1) {
    for (Eigen::Index g = 0; g < risks.size(); ++g) {
      if (risks(g) == best) return static_cast<int>(g);
    }
  }
  // Uniform choice among exact minimizers; deterministic tie-breaking would
  // bias the posterior toward low indices.
  std::int64_t pick = rng.uniform_int(0, n_ties - 1);
  for (Eigen::Index g = 0; g < risks.size(); ++g) {
    if (risks(g) == best && pick-- == 0) return static_cast<int>(g);
  }
  return 0;  // unreachable
}

}  // namespace

int sample_best(const LossMatrix& loss_matrix, Rng& rng) {
  if (loss_matrix.num_predictors() < 1) {
    throw std::invalid_argument("sample_best: empty loss matrix");
  }
  const BootstrapWeights w = draw_bootstrap(loss_matrix.num_examples(), rng);
  Eigen::VectorXd risks(loss_matrix.num_predictors());
  for (int g = 0; g < loss_matrix.num_predictors(); ++g) {
    risks(g) = weighted_risk(loss_matrix.losses.row(g).transpose(), w);
  }
  return argmin_with_random_ties(risks, rng);
}

int sample_best(const LossMatrix& loss_matrix, std::uint64_t seed) {
  Rng rng(seed);
  return sample_best(loss_matrix, rng);
}

BestPosterior estimate_best_posterior(const LossMatrix& loss_matrix, long n_samples,
                                      std::uint64_t seed) {
  if (n_samples < 1) {
    throw std::invalid_argument("estimate_best_posterior: n_samples must be >= 1");
  }
  Eigen::VectorXi wins = Eigen::VectorXi::Zero(loss_matrix.num_predictors());
  for (long s = 0; s < n_samples; ++s) {
    // Per-sample derived seeds keep the estimate independent of scheduling.
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    wins(sample_best(loss_matrix, rng)) += 1;
  }
  BestPosterior posterior;
  posterior.n_samples = n_samples;
  posterior.probs = wins.cast<double>() / static_cast<double>(n_samples);
  return posterior;
}

double ensemble_predict_classification(const Ensemble& ensemble,
                                       const Eigen::VectorXd& x) {
  if (ensemble.members.empty()) {
    throw std::invalid_argument("ensemble_predict: empty ensemble");
  }
  std::map<long, double> tally;  // ordered: ties resolve to the smallest label
  for (const Ensemble::Member& m : ensemble.members) {
    tally[std::lround(m.predictor->predict(x))] += m.weight;
  }
  long best_label = tally.begin()->first;
  double best_weight = tally.begin()->second;
  for (const auto& [label, weight] : tally) {
    if (weight > best_weight) {
      best_weight = weight;
      best_label = label;
    }
  }
  return static_cast<double>(best_label);
}

double ensemble_predict_regression(const Ensemble& ensemble, const Eigen::VectorXd& x) {
  if (ensemble.members.empty()) {
    throw std::invalid_argument("ensemble_predict: empty ensemble");
  }
  double sum = 0.0;
  double weight_sum = 0.0;
  for (const Ensemble::Member& m : ensemble.members) {
    sum += m.weight * m.predictor->predict(x);
    weight_sum += m.weight;
  }
  if (weight_sum <= 0.0) {
    throw std::invalid_argument("ensemble_predict: nonpositive total weight");
  }
  return sum / weight_sum;
}

double ensemble_predict(const Ensemble& ensemble, const Eigen::VectorXd& x) {
  return ensemble.task_kind == TaskKind::classification
             ? ensemble_predict_classification(ensemble, x)
             : ensemble_predict_regression(ensemble, x);
}

double empirical_risk(const Predictor& predictor, const Dataset& dataset, Split split,
                      LossKind loss, const BootstrapWeights& weights) {
  return weighted_risk(example_losses(predictor, dataset, split, loss), weights);
}

void LossMatrix::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("LossMatrix: cannot write " + path);
  char buf[32];
  for (int g = 0; g < num_predictors(); ++g) {
    for (int i = 0; i < num_examples(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", losses(g, i));
      out << buf << (i + 1 < num_examples() ? "," : "");
    }
    out << '\n';
  }
}

LossMatrix LossMatrix::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("LossMatrix: cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("LossMatrix: ragged CSV " + path);
    }
    rows.push_back(std::move(row));
  }
  LossMatrix m;
  if (rows.empty()) return m;
  m.losses.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.front().size()));
  for (size_t g = 0; g < rows.size(); ++g) {
    for (size_t i = 0; i < rows.front().size(); ++i) {
      m.losses(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(i)) = rows[g][i];
    }
  }
  return m;
}

}  // namespace abopt
