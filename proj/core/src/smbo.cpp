#include "abopt/smbo.hpp"

#include <chrono>
#include <cmath>

#include "abopt/rng.hpp"
#include "abopt/sobol.hpp"

namespace abopt {
namespace {

constexpr std::uint64_t kInitTag = 0x501B01;
constexpr std::uint64_t kFitTag = 0xF17;
constexpr std::uint64_t kEiTag = 0xE1;
constexpr std::uint64_t kDupTag = 0xD0B;
constexpr std::uint64_t kRsTag = 0x25;

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

// Resolves duplicate suggestions: re-evaluating a noiseless objective is
// worthless, so nudge the point with uniform noise in normalized units,
// widening every 10 attempts. Exhausted (finite) spaces fall through to the
// original config.
HyperParamConfig dedup(const HyperParamSpace& space, HyperParamConfig config,
                       const History& history, std::uint64_t seed) {
  if (!is_duplicate_config(space, config, history)) return config;
  Rng rng(seed);
  const Eigen::VectorXd u = space.normalize(config);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const double width = 1e-3 * std::pow(2.0, attempt / 10);
    Eigen::VectorXd v = u;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      v(j) += width * (rng.uniform01() - 0.5);
    }
    HyperParamConfig candidate = space.denormalize(v);
    if (!is_duplicate_config(space, candidate, history)) return candidate;
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    HyperParamConfig candidate = space.sample_uniform(rng);
    if (!is_duplicate_config(space, candidate, history)) return candidate;
  }
  return config;
}

}  // namespace

bool is_duplicate_config(const HyperParamSpace& space, const HyperParamConfig& config,
                         const History& history) {
  const Eigen::VectorXd u = space.normalize(config);
  for (const History::Record& record : history.records) {
    const Eigen::VectorXd v = space.normalize(record.config);
    if ((u - v).lpNorm<Eigen::Infinity>() <= 1e-9) return true;
  }
  return false;
}

SuggestInfo suggest_ex(const History& history, const HyperParamSpace& space,
                       std::uint64_t seed, const GPModel* warm_start) {
  const int n = history.size();
  SuggestInfo info;

  if (n < kInitialDesignSize || history.finite_count() == 0) {
    const Eigen::MatrixXd design =
        sobol_points(space.size(), n + 1, derive_seed(seed, kInitTag));
    info.config = space.denormalize(design.row(n).transpose());
    info.from_initial_design = true;
    info.config = dedup(space, std::move(info.config), history,
                        derive_seed(seed, kDupTag, static_cast<std::uint64_t>(n)));
    return info;
  }

  GPModel gp = fit_gp(history, space,
                      derive_seed(seed, kFitTag, static_cast<std::uint64_t>(n)),
                      warm_start);
  double r_best = std::numeric_limits<double>::infinity();
  for (const History::Record& record : history.records) {
    if (std::isfinite(record.risk)) r_best = std::min(r_best, record.risk);
  }
  const AcquisitionResult acq = maximize_ei(
      gp, space, r_best, derive_seed(seed, kEiTag, static_cast<std::uint64_t>(n)));
  info.config = dedup(space, acq.config, history,
                      derive_seed(seed, kDupTag, static_cast<std::uint64_t>(n)));
  info.ei_converged = acq.converged;
  info.ei_value = acq.ei_value;
  info.gp = std::move(gp);
  return info;
}

HyperParamConfig suggest(const History& history, const HyperParamSpace& space,
                         std::uint64_t seed) {
  return suggest_ex(history, space, seed, nullptr).config;
}

namespace {

RunResult run_loop(const TuningProblem& problem, int budget, std::uint64_t seed,
                   const IterationCallback& callback, bool model_based) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  const HyperParamSpace& space = problem.space();

  RunResult result;
  std::optional<GPModel> warm;
  Rng rs_rng(derive_seed(seed, kRsTag));

  for (int k = 1; k <= budget; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    HyperParamConfig config;
    if (model_based) {
      SuggestInfo info =
          suggest_ex(result.history, space, seed, warm ? &*warm : nullptr);
      if (info.gp) warm = std::move(info.gp);
      config = std::move(info.config);
    } else {
      config = space.sample_uniform(rs_rng);
    }

    const EvalOutcome outcome = problem.evaluate(config);
    result.history.add(outcome.config, outcome.valid_risk);
    if (!outcome.failed && outcome.valid_risk < result.best_risk) {
      result.best_risk = outcome.valid_risk;
      result.best_config = outcome.config;
      result.best_predictor = outcome.predictor;
    }
    if (callback) {
      IterationRecord record;
      record.iteration = k;
      record.wall_time_ms = elapsed_ms(t0);
      record.outcome = &outcome;
      callback(record);
    }
  }
  if (result.best_predictor == nullptr && !result.history.empty()) {
    result.best_config = result.history.records.front().config;
  }
  return result;
}

}  // namespace

RunResult run_smbo(const TuningProblem& problem, int budget, std::uint64_t seed,
                   const IterationCallback& callback) {
  return run_loop(problem, budget, seed, callback, /*model_based=*/true);
}

RunResult run_random_search(const TuningProblem& problem, int budget,
                            std::uint64_t seed, const IterationCallback& callback) {
  return run_loop(problem, budget, seed, callback, /*model_based=*/false);
}

}  // namespace abopt
