#include "abopt/gp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "abopt/errors.hpp"
#include "abopt/optimize.hpp"
#include "abopt/rng.hpp"
#include "abopt/sobol.hpp"

namespace abopt {
namespace {

constexpr double kSqrt5 = 2.2360679774997896964;
constexpr double kLogAmplitudeLo = -9.210340371976182;  // log 1e-4
constexpr double kLogAmplitudeHi = 6.907755278982137;   // log 1e3
constexpr double kLogLengthLo = -6.907755278982137;     // log 1e-3
constexpr double kLogLengthHi = 4.605170185988092;      // log 1e2

double matern_profile(double d) {
  return (1.0 + kSqrt5 * d + 5.0 / 3.0 * d * d) * std::exp(-kSqrt5 * d);
}

// Pairwise scaled distance matrix d_ii' for rows of X.
Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& length_scales) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd scaled = X * length_scales.cwiseInverse().asDiagonal();
  Eigen::MatrixXd d2(n, n);
  const Eigen::VectorXd sq = scaled.rowwise().squaredNorm();
  d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
       2.0 * scaled * scaled.transpose();
  return d2.cwiseMax(0.0).cwiseSqrt();
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelParams& p) {
  Eigen::MatrixXd K = distance_matrix(X, p.length_scales);
  const Eigen::Index n = K.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K(i, j) = p.amplitude * matern_profile(K(i, j));
    }
  }
  return K;
}

Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& X, const Eigen::VectorXd& u,
                              const KernelParams& p) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d =
        ((X.row(i).transpose() - u).cwiseQuotient(p.length_scales)).norm();
    k(i) = p.amplitude * matern_profile(d);
  }
  return k;
}

std::optional<Eigen::LLT<Eigen::MatrixXd>> try_factorize(Eigen::MatrixXd K_tilde) {
  Eigen::LLT<Eigen::MatrixXd> llt(std::move(K_tilde));
  if (llt.info() != Eigen::Success) return std::nullopt;
  return llt;
}

struct LmlCore {
  double value;
  Eigen::VectorXd grad;
};

// Shared implementation: returns nullopt when the factorization fails so fit
// callers can escalate jitter instead of unwinding. Gradient work is skipped
// when want_grad is false (line-search evaluations).
std::optional<LmlCore> lml_core(const KernelParams& params, double mean_const,
                                const Eigen::MatrixXd& inputs,
                                const Eigen::VectorXd& targets,
                                bool want_grad = true) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index dim = inputs.cols();

  const Eigen::MatrixXd D = distance_matrix(inputs, params.length_scales);
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K(i, j) = params.amplitude * matern_profile(D(i, j));
    }
  }
  Eigen::MatrixXd K_tilde = K;
  K_tilde.diagonal().array() += params.jitter;

  auto llt = try_factorize(K_tilde);
  if (!llt) return std::nullopt;

  const Eigen::VectorXd z = targets.array() - mean_const;
  const Eigen::VectorXd alpha = llt->solve(z);

  double log_det = 0.0;
  const Eigen::MatrixXd& L = llt->matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(L(i, i));

  LmlCore out;
  out.value = -0.5 * z.dot(alpha) - 0.5 * log_det -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!want_grad) return out;

  // A = alpha alpha^T - K_tilde^-1; dL/dtheta = 0.5 tr(A dK/dtheta).
  Eigen::MatrixXd A = alpha * alpha.transpose();
  A -= llt->solve(Eigen::MatrixXd::Identity(n, n));

  out.grad.resize(dim + 2);
  out.grad(0) = 0.5 * A.cwiseProduct(K).sum();  // d/dlog amplitude (jitter fixed)

  // d k / d log ell_j = (5/3) a s_j (1 + sqrt5 d) exp(-sqrt5 d),
  // s_j = ((u_j - v_j)/ell_j)^2.
  Eigen::MatrixXd W(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = D(i, j);
      W(i, j) = 5.0 / 3.0 * params.amplitude * (1.0 + kSqrt5 * d) *
                std::exp(-kSqrt5 * d);
    }
  }
  for (Eigen::Index q = 0; q < dim; ++q) {
    const Eigen::VectorXd col = inputs.col(q) / params.length_scales(q);
    double g = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double diff = col(i) - col(j);
        g += A(i, j) * W(i, j) * diff * diff;
      }
    }
    out.grad(1 + q) = 0.5 * g;
  }
  out.grad(dim + 1) = alpha.sum();  // d/dmean
  return out;
}

void check_kernel_params(const KernelParams& p) {
  if (!(p.amplitude > 0.0)) throw std::invalid_argument("amplitude must be > 0");
  if (!(p.jitter > 0.0)) throw std::invalid_argument("jitter must be > 0");
  if ((p.length_scales.array() <= 0.0).any()) {
    throw std::invalid_argument("length scales must be > 0");
  }
}

}  // namespace

double matern52(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                const KernelParams& params) {
  if (u.size() != v.size() || u.size() != params.length_scales.size()) {
    throw std::invalid_argument("matern52: dimension mismatch");
  }
  check_kernel_params(params);
  const double d = ((u - v).cwiseQuotient(params.length_scales)).norm();
  return params.amplitude * matern_profile(d);
}

LmlResult log_marginal_likelihood(const KernelParams& params, double mean_const,
                                  const Eigen::MatrixXd& inputs,
                                  const Eigen::VectorXd& targets) {
  if (inputs.rows() < 1) {
    throw std::invalid_argument("log_marginal_likelihood: no observations");
  }
  if (inputs.rows() != targets.size()) {
    throw std::invalid_argument("log_marginal_likelihood: inputs/targets mismatch");
  }
  if (inputs.cols() != params.length_scales.size()) {
    throw std::invalid_argument("log_marginal_likelihood: dimension mismatch");
  }
  check_kernel_params(params);
  auto core = lml_core(params, mean_const, inputs, targets);
  if (!core) {
    throw NumericalError("log_marginal_likelihood: factorization failed at jitter " +
                         std::to_string(params.jitter));
  }
  return {core->value, std::move(core->grad)};
}

GPModel::GPModel(HyperParamSpace space, std::vector<HyperParamConfig> train_configs,
                 Eigen::VectorXd train_targets, KernelParams kernel,
                 double mean_const)
    : space_(std::move(space)),
      train_configs_(std::move(train_configs)),
      targets_(std::move(train_targets)),
      kernel_(std::move(kernel)),
      mean_const_(mean_const) {
  const int n = static_cast<int>(train_configs_.size());
  if (n == 0) throw std::invalid_argument("GPModel: no observations");
  if (targets_.size() != n) throw std::invalid_argument("GPModel: targets mismatch");
  if (kernel_.length_scales.size() != space_.size()) {
    throw std::invalid_argument("GPModel: length-scale dimension mismatch");
  }
  check_kernel_params(kernel_);

  inputs_.resize(n, space_.size());
  for (int i = 0; i < n; ++i) {
    inputs_.row(i) = space_.normalize(train_configs_[static_cast<size_t>(i)]);
  }

  Eigen::MatrixXd K_tilde = kernel_matrix(inputs_, kernel_);
  K_tilde.diagonal().array() += kernel_.jitter;
  auto llt = try_factorize(std::move(K_tilde));
  if (!llt) {
    throw NumericalError("GPModel: Cholesky factorization failed at jitter " +
                         std::to_string(kernel_.jitter));
  }
  chol_ = llt->matrixL();
  alpha_ = llt->solve(Eigen::VectorXd(targets_.array() - mean_const_));
}

std::pair<double, double> GPModel::predict(const HyperParamConfig& query) const {
  return predict_normalized(space_.normalize(query));
}

std::pair<double, double> GPModel::predict_normalized(const Eigen::VectorXd& u) const {
  if (u.size() != inputs_.cols()) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  const Eigen::VectorXd k = kernel_vector(inputs_, u, kernel_);
  const double mean = mean_const_ + k.dot(alpha_);
  const Eigen::VectorXd w =
      chol_.triangularView<Eigen::Lower>().solve(k);
  double variance = kernel_.amplitude - w.squaredNorm();
  if (variance < 0.0) variance = 0.0;
  return {mean, variance};
}

GPModel fit_gp(const History& history, const HyperParamSpace& space,
               std::uint64_t seed, const GPModel* warm_start) {
  const auto records = history.finite_records();
  const int n = static_cast<int>(records.size());
  if (n == 0) {
    throw std::invalid_argument("fit_gp: history has no finite-risk record");
  }
  const int dim = space.size();

  std::vector<HyperParamConfig> configs;
  configs.reserve(static_cast<size_t>(n));
  Eigen::MatrixXd X(n, dim);
  Eigen::VectorXd raw(n);
  for (int i = 0; i < n; ++i) {
    configs.push_back(records[static_cast<size_t>(i)]->config);
    X.row(i) = space.normalize(configs.back());
    raw(i) = records[static_cast<size_t>(i)]->risk;
  }

  // Standardize targets so the amplitude/mean search box is scale free.
  const double shift = raw.mean();
  double scale = std::sqrt((raw.array() - shift).square().mean());
  if (!(scale > 1e-12)) scale = 1.0;
  const Eigen::VectorXd z = (raw.array() - shift) / scale;

  // Optimization variables: [log amplitude, log ell_1..D, mean].
  const int nvars = dim + 2;
  Eigen::VectorXd lo(nvars), hi(nvars);
  lo(0) = kLogAmplitudeLo;
  hi(0) = kLogAmplitudeHi;
  for (int j = 0; j < dim; ++j) {
    lo(1 + j) = kLogLengthLo;
    hi(1 + j) = kLogLengthHi;
  }
  lo(nvars - 1) = -50.0;
  hi(nvars - 1) = 50.0;

  std::vector<Eigen::VectorXd> starts;
  {
    Eigen::VectorXd x0(nvars);
    if (warm_start != nullptr && warm_start->kernel().length_scales.size() == dim) {
      const KernelParams& wk = warm_start->kernel();
      x0(0) = std::log(wk.amplitude / (scale * scale));
      for (int j = 0; j < dim; ++j) x0(1 + j) = std::log(wk.length_scales(j));
      x0(nvars - 1) = (warm_start->mean_const() - shift) / scale;
    } else {
      x0(0) = 0.0;
      for (int j = 0; j < dim; ++j) x0(1 + j) = std::log(0.3);
      x0(nvars - 1) = 0.0;
    }
    starts.push_back(x0.cwiseMax(lo).cwiseMin(hi));
  }
  const Eigen::MatrixXd sobol = sobol_points(dim + 1, 7, derive_seed(seed, 0xF17));
  for (int s = 0; s < 7; ++s) {
    Eigen::VectorXd x0(nvars);
    x0(0) = kLogAmplitudeLo + sobol(s, dim) * (kLogAmplitudeHi - kLogAmplitudeLo);
    for (int j = 0; j < dim; ++j) {
      x0(1 + j) = kLogLengthLo + sobol(s, j) * (kLogLengthHi - kLogLengthLo);
    }
    x0(nvars - 1) = 0.0;
    starts.push_back(std::move(x0));
  }

  BoxOptOptions opt_options;
  opt_options.max_iterations = 50;
  opt_options.step_tolerance = 1e-6;
  opt_options.grad_tolerance = 1e-5;

  std::string attempted;
  for (double jitter = 1e-8; jitter <= 1e-2 * (1.0 + 1e-12); jitter *= 10.0) {
    attempted += (attempted.empty() ? "" : ", ") + std::to_string(jitter);

    const auto objective = [&](const Eigen::VectorXd& x,
                               Eigen::VectorXd* grad) -> double {
      KernelParams p;
      p.amplitude = std::exp(x(0));
      p.length_scales = x.segment(1, dim).array().exp();
      p.jitter = jitter;
      auto core = lml_core(p, x(nvars - 1), X, z, grad != nullptr);
      if (!core) return -std::numeric_limits<double>::infinity();
      if (grad != nullptr) *grad = core->grad;
      return core->value;
    };

    double best_value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    for (const Eigen::VectorXd& x0 : starts) {
      const BoxOptResult res = maximize_box(objective, lo, hi, x0, opt_options);
      if (std::isfinite(res.value) && res.value > best_value) {
        best_value = res.value;
        best_x = res.x;
      }
    }
    if (std::isfinite(best_value)) {
      KernelParams fitted;
      fitted.amplitude = std::exp(best_x(0)) * scale * scale;
      fitted.length_scales = best_x.segment(1, dim).array().exp();
      fitted.jitter = jitter * scale * scale;
      const double mean_const = shift + scale * best_x(nvars - 1);
      return GPModel(space, std::move(configs), std::move(raw), std::move(fitted),
                     mean_const);
    }
  }
  throw NumericalError("fit_gp: factorization failed; attempted jitter levels: " +
                       attempted);
}

}  // namespace abopt
