#pragma once

#include <Eigen/Core>
#include <functional>

namespace abopt {

// Objective callback: returns the value at x and, when grad is non-null,
// fills the gradient. Must return -inf (or NaN) for infeasible evaluations;
// such points are rejected by the line search.
using BoxObjective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BoxOptOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-6;     // stop when the accepted step is shorter
  double grad_tolerance = 1e-7;     // stop on small projected gradient
  int max_backtracks = 30;
};

struct BoxOptResult {
  Eigen::VectorXd x;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;  // hit a tolerance (vs. the iteration cap)
};

// Maximizes f over the box [lo, hi] by spectral projected gradient ascent with
// a Barzilai-Borwein step and Armijo backtracking. Deterministic for fixed
// inputs. If f(x0) is non-finite the result carries value = -inf.
BoxOptResult maximize_box(const BoxObjective& f, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi, const Eigen::VectorXd& x0,
                          const BoxOptOptions& options = {});

// Wraps a value-only objective with central finite differences so it can be
// used with maximize_box. Evaluation points are clamped to the box.
BoxObjective with_numeric_gradient(std::function<double(const Eigen::VectorXd&)> f,
                                   Eigen::VectorXd lo, Eigen::VectorXd hi,
                                   double h = 1e-6);

}  // namespace abopt
