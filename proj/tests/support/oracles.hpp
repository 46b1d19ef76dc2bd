// Test-only oracles, independent of the library implementation paths they
// check.
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracles {

// Monte Carlo estimate of E[max(r_best - f, 0)] with f ~ N(mean, stdev^2).
// Returns {estimate, standard error}.
inline std::pair<double, double> mc_expected_improvement(double mean, double stdev,
                                                         double r_best, long n,
                                                         unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal(mean, stdev);
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double imp = std::max(r_best - normal(eng), 0.0);
    sum += imp;
    sum_sq += imp * imp;
  }
  const double est = sum / static_cast<double>(n);
  const double var = sum_sq / static_cast<double>(n) - est * est;
  return {est, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

// Exact posterior over the best predictor for a 3-example loss matrix by
// enumerating all 27 equiprobable ordered resamples; exact risk ties split
// their probability mass evenly.
inline std::vector<double> enumerate_best_posterior_3(const Eigen::MatrixXd& losses) {
  const int k = static_cast<int>(losses.rows());
  std::vector<double> probs(static_cast<size_t>(k), 0.0);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        std::vector<double> risks(static_cast<size_t>(k));
        for (int g = 0; g < k; ++g) {
          risks[static_cast<size_t>(g)] =
              (losses(g, a) + losses(g, b) + losses(g, c)) / 3.0;
        }
        const double best = *std::min_element(risks.begin(), risks.end());
        int ties = 0;
        for (double r : risks) ties += (r == best);
        for (int g = 0; g < k; ++g) {
          if (risks[static_cast<size_t>(g)] == best) {
            probs[static_cast<size_t>(g)] += 1.0 / (27.0 * ties);
          }
        }
      }
    }
  }
  return probs;
}

// Star-discrepancy estimate for 2-D points: sup over axis-aligned boxes
// anchored at the origin with corners on the sample coordinates, counting both
// open and closed boxes.
inline double star_discrepancy_2d(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  std::vector<double> xs, ys;
  xs.reserve(static_cast<size_t>(n) + 1);
  ys.reserve(static_cast<size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    xs.push_back(points(i, 0));
    ys.push_back(points(i, 1));
  }
  xs.push_back(1.0);
  ys.push_back(1.0);
  double worst = 0.0;
  for (double x : xs) {
    for (double y : ys) {
      int open = 0, closed = 0;
      for (int i = 0; i < n; ++i) {
        const double px = points(i, 0), py = points(i, 1);
        open += (px < x && py < y);
        closed += (px <= x && py <= y);
      }
      const double vol = x * y;
      worst = std::max(worst, std::abs(open / static_cast<double>(n) - vol));
      worst = std::max(worst, std::abs(closed / static_cast<double>(n) - vol));
    }
  }
  return worst;
}

// Sign-test tail by explicit enumeration of all 2^n win/loss patterns.
inline double sign_test_bruteforce(int n, int wins) {
  long hits = 0;
  for (long mask = 0; mask < (1L << n); ++mask) {
    int w = 0;
    for (int b = 0; b < n; ++b) w += (mask >> b) & 1;
    hits += (w >= wins);
  }
  return static_cast<double>(hits) / static_cast<double>(1L << n);
}

// Pr(X > 0.5) for X ~ Beta(a, b) by composite Simpson quadrature.
inline double beta_tail_quadrature(double a, double b) {
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const auto density = [&](double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
  };
  const int intervals = 20000;  // even
  const double h = 0.5 / intervals;
  double acc = density(0.5) + density(1.0);
  for (int i = 1; i < intervals; ++i) {
    acc += density(0.5 + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// Dense-grid minimum of a 2-D function over a box.
template <typename F>
double grid_min_2d(F&& f, double x_lo, double x_hi, double y_lo, double y_hi,
                   int resolution) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= resolution; ++i) {
    for (int j = 0; j <= resolution; ++j) {
      const double x = x_lo + (x_hi - x_lo) * i / resolution;
      const double y = y_lo + (y_hi - y_lo) * j / resolution;
      best = std::min(best, f(x, y));
    }
  }
  return best;
}

}  // namespace oracles
