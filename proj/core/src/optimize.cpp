#include "abopt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace abopt {
namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

BoxOptResult maximize_box(const BoxObjective& f, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi, const Eigen::VectorXd& x0,
                          const BoxOptOptions& options) {
  BoxOptResult result;
  Eigen::VectorXd x = project(x0, lo, hi);
  Eigen::VectorXd grad(x.size());
  double fx = f(x, &grad);
  result.x = x;
  result.value = fx;
  if (!finite(fx)) return result;

  double bb_step = 1.0 / std::max(1.0, grad.lpNorm<Eigen::Infinity>());
  constexpr double kArmijo = 1e-4;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;

    const Eigen::VectorXd direction = project(x + bb_step * grad, lo, hi) - x;
    const double slope = grad.dot(direction);
    if (direction.lpNorm<Eigen::Infinity>() <= options.grad_tolerance ||
        slope <= 0.0) {
      result.converged = true;
      break;
    }

    double lambda = 1.0;
    double f_new = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    Eigen::VectorXd grad_new(x.size());
    bool accepted = false;
    bool have_grad = false;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      x_new = project(x + lambda * direction, lo, hi);
      // The full step is usually accepted; fetch its gradient in the same
      // evaluation. Backtracked probes are value-only.
      have_grad = (bt == 0);
      f_new = f(x_new, have_grad ? &grad_new : nullptr);
      if (finite(f_new) && f_new >= fx + kArmijo * lambda * slope) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      result.converged = true;  // no ascent step available at this scale
      break;
    }
    if (!have_grad) f(x_new, &grad_new);

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    // BB step for ascent: curvature sy is negative near a maximum.
    bb_step = (sy < 0.0) ? std::clamp(s.squaredNorm() / (-sy), 1e-10, 1e6)
                         : 1.0;

    const double step_len = s.lpNorm<Eigen::Infinity>();
    x = std::move(x_new);
    grad = grad_new;
    fx = f_new;
    result.x = x;
    result.value = fx;
    if (step_len <= options.step_tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

BoxObjective with_numeric_gradient(std::function<double(const Eigen::VectorXd&)> f,
                                   Eigen::VectorXd lo, Eigen::VectorXd hi,
                                   double h) {
  return [f = std::move(f), lo = std::move(lo), hi = std::move(hi),
          h](const Eigen::VectorXd& x, Eigen::VectorXd* grad) -> double {
    const double fx = f(x);
    if (grad != nullptr) {
      grad->resize(x.size());
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp(j) = std::min(x(j) + h, hi(j));
        xm(j) = std::max(x(j) - h, lo(j));
        const double denom = xp(j) - xm(j);
        (*grad)(j) = denom > 0.0 ? (f(xp) - f(xm)) / denom : 0.0;
      }
    }
    return fx;
  };
}

}  // namespace abopt
