#include "abopt/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "abopt/optimize.hpp"
#include "abopt/rng.hpp"
#include "abopt/sobol.hpp"

namespace abopt {
namespace {

constexpr int kNumCandidates = 512;
constexpr int kNumRefined = 10;
constexpr double kFlatThreshold = 1e-300;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) != b(j)) return a(j) < b(j);
  }
  return false;
}

}  // namespace

double expected_improvement(double mean, double stdev, double r_best) {
  if (stdev <= 0.0) return std::max(r_best - mean, 0.0);
  const double d = (r_best - mean) / stdev;
  return std::max(stdev * (d * norm_cdf(d) + norm_pdf(d)), 0.0);
}

AcquisitionResult maximize_ei(const GPModel& gp, const HyperParamSpace& space,
                              double r_best, std::uint64_t seed) {
  const int dim = space.size();
  const auto ei_at = [&](const Eigen::VectorXd& u) {
    const auto [mean, variance] = gp.predict_normalized(u);
    return expected_improvement(mean, std::sqrt(variance), r_best);
  };

  const Eigen::MatrixXd candidates =
      sobol_points(dim, kNumCandidates, derive_seed(seed, 0xCA11));
  std::vector<double> scores(kNumCandidates);
  for (int i = 0; i < kNumCandidates; ++i) {
    scores[static_cast<size_t>(i)] = ei_at(candidates.row(i).transpose());
  }

  std::vector<int> order(kNumCandidates);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = scores[static_cast<size_t>(a)];
    const double sb = scores[static_cast<size_t>(b)];
    if (sa != sb) return sa > sb;
    return lex_less(candidates.row(a).transpose(), candidates.row(b).transpose());
  });

  AcquisitionResult result;
  if (scores[static_cast<size_t>(order[0])] <= kFlatThreshold) {
    Rng rng(derive_seed(seed, 0xF1A7));
    result.config = space.sample_uniform(rng);
    result.ei_value = ei_at(space.normalize(result.config));
    result.n_restarts_used = 0;
    result.converged = false;
    return result;
  }

  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(dim);
  const BoxObjective objective = with_numeric_gradient(ei_at, lo, hi);
  BoxOptOptions options;
  options.max_iterations = 100;
  options.step_tolerance = 1e-6;

  Eigen::VectorXd best_u;
  double best_ei = -1.0;
  const int n_refined = std::min(kNumRefined, kNumCandidates);
  for (int s = 0; s < n_refined; ++s) {
    const Eigen::VectorXd x0 = candidates.row(order[static_cast<size_t>(s)]).transpose();
    const BoxOptResult res = maximize_box(objective, lo, hi, x0, options);
    if (res.value > best_ei ||
        (res.value == best_ei && lex_less(res.x, best_u))) {
      best_ei = res.value;
      best_u = res.x;
    }
  }

  result.config = space.denormalize(best_u);  // snaps integer dims
  result.ei_value = ei_at(space.normalize(result.config));
  result.n_restarts_used = n_refined;
  result.converged = true;
  return result;
}

}  // namespace abopt
