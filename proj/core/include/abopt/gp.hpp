#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "abopt/space.hpp"

namespace abopt {

// Matern 5/2 covariance with per-dimension (ARD) length scales. `amplitude` is
// the signal variance k(u, u); `jitter` is added to the Gram diagonal.
struct KernelParams {
  double amplitude = 1.0;
  Eigen::VectorXd length_scales;
  double jitter = 1e-8;
};

// k(u, v) = amplitude * (1 + sqrt(5) d + 5 d^2 / 3) exp(-sqrt(5) d) with
// d^2 = sum_j ((u_j - v_j) / ell_j)^2. Throws std::invalid_argument on
// dimension mismatch.
double matern52(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                const KernelParams& params);

struct LmlResult {
  double value = 0.0;
  // Layout: [d/dlog(amplitude), d/dlog(ell_1), ..., d/dlog(ell_D), d/dmean].
  Eigen::VectorXd grad;
};

// Log evidence of the GP with constant mean under K + jitter*I, with the exact
// analytic gradient in log-parameter space (jitter held fixed). Inputs are
// rows of `inputs`. Throws std::invalid_argument on empty data and
// NumericalError if the Gram matrix cannot be factorized.
LmlResult log_marginal_likelihood(const KernelParams& params, double mean_const,
                                  const Eigen::MatrixXd& inputs,
                                  const Eigen::VectorXd& targets);

// Immutable fitted GP over the unit-cube image of a hyperparameter space.
// Safe to share read-only across threads.
class GPModel {
 public:
  GPModel(HyperParamSpace space, std::vector<HyperParamConfig> train_configs,
          Eigen::VectorXd train_targets, KernelParams kernel, double mean_const);

  // Posterior mean and variance at a query point. Variance is clamped at zero
  // against round-off.
  std::pair<double, double> predict(const HyperParamConfig& query) const;
  std::pair<double, double> predict_normalized(const Eigen::VectorXd& u) const;

  const HyperParamSpace& space() const { return space_; }
  const KernelParams& kernel() const { return kernel_; }
  double mean_const() const { return mean_const_; }
  const Eigen::MatrixXd& train_inputs() const { return inputs_; }
  const Eigen::VectorXd& train_targets() const { return targets_; }
  const Eigen::MatrixXd& chol_factor() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  int num_observations() const { return static_cast<int>(targets_.size()); }

 private:
  HyperParamSpace space_;
  std::vector<HyperParamConfig> train_configs_;
  Eigen::MatrixXd inputs_;  // normalized, rows = observations
  Eigen::VectorXd targets_;
  KernelParams kernel_;
  double mean_const_ = 0.0;
  Eigen::MatrixXd chol_;   // lower triangular, chol_ * chol_^T = K + jitter*I
  Eigen::VectorXd alpha_;  // (K + jitter*I)^-1 (targets - mean)
};

// Fits kernel parameters and the constant mean by multi-start projected
// gradient ascent on the marginal likelihood (8 starts: warm start or a
// default, plus 7 Sobol-sampled points in the log-parameter box). Targets are
// variance-standardized internally; the returned model carries equivalent
// raw-scale parameters. Deterministic for fixed (history, seed).
//
// Throws std::invalid_argument when the history has no finite-risk record and
// NumericalError if factorization fails at every jitter level.
GPModel fit_gp(const History& history, const HyperParamSpace& space,
               std::uint64_t seed, const GPModel* warm_start = nullptr);

}  // namespace abopt
