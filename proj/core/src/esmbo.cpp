#include "abopt/esmbo.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "abopt/errors.hpp"
#include "abopt/rng.hpp"

namespace abopt {
namespace {

constexpr std::uint64_t kBootstrapTag = 0xB007;
constexpr std::uint64_t kFinalizeTag = 0xF1A1;
constexpr std::uint64_t kTieTag = 0x71E;
constexpr std::uint64_t kRsTag = 0x25;  // shared with run_random_search: ERS and
                                        // RS draw the same config sequence per seed

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

std::vector<int> current_winners(const EnsembleRunState& state) {
  std::vector<int> winners(state.histories.size());
  for (size_t j = 0; j < state.histories.size(); ++j) {
    winners[j] = state.histories[j].argmin_finite();
  }
  return winners;
}

EnsembleRunState init_state(const TuningProblem& problem, int ensemble_size,
                            std::uint64_t seed, const EsmboOptions& options) {
  EnsembleRunState state;
  state.histories.resize(static_cast<size_t>(ensemble_size));
  state.task_kind = !problem.is_synthetic() && problem.dataset().classification
                        ? TaskKind::classification
                        : TaskKind::regression;
  const int m = problem.validation_size();
  state.bootstrap_weights.reserve(static_cast<size_t>(ensemble_size));
  for (int j = 1; j <= ensemble_size; ++j) {
    state.bootstrap_weights.push_back(
        options.uniform_weights
            ? uniform_weights(m)
            : draw_bootstrap(m, derive_seed(seed, kBootstrapTag,
                                            static_cast<std::uint64_t>(j))));
  }
  return state;
}

// Trains the config, shares its loss row across every history, and appends to
// the trained list. One call = one training.
void observe(EnsembleRunState& state, const TuningProblem& problem,
             const HyperParamConfig& config, const EsmboIterationCallback& callback,
             int active_history, std::chrono::steady_clock::time_point t0) {
  const EvalOutcome outcome = problem.evaluate(config);
  state.train_count += 1;

  EsmboIterationRecord record;
  record.iteration = state.train_count;
  record.active_history = active_history;
  record.outcome = &outcome;

  if (outcome.failed) {
    for (History& h : state.histories) {
      h.add(outcome.config, std::numeric_limits<double>::infinity());
    }
    state.trained.emplace_back(outcome.config, nullptr);
    record.bootstrap_risks.assign(state.histories.size(),
                                  std::numeric_limits<double>::infinity());
  } else {
    state.loss_cache[outcome.config] = outcome.valid_losses;
    state.trained.emplace_back(outcome.config, outcome.predictor);
    record.bootstrap_risks.reserve(state.histories.size());
    for (size_t j = 0; j < state.histories.size(); ++j) {
      const double risk =
          weighted_risk(outcome.valid_losses, state.bootstrap_weights[j]);
      state.histories[j].add(outcome.config, risk);
      record.bootstrap_risks.push_back(risk);
    }
  }

  if (callback) {
    record.wall_time_ms = elapsed_ms(t0);
    record.winners = current_winners(state);
    callback(record);
  }
}

}  // namespace

int round_robin_index(int k, int n) {
  if (k < 1 || n < 1) throw std::invalid_argument("round_robin_index: k, n >= 1");
  return (k - 1) % n + 1;
}

Ensemble finalize_ensemble(const EnsembleRunState& state, std::uint64_t seed) {
  if (state.trained.empty()) {
    throw std::invalid_argument("finalize_ensemble: no trained predictor");
  }
  const int n = static_cast<int>(state.histories.size());
  std::map<int, double> weight_by_trained;  // ascending trained index
  for (int j = 0; j < n; ++j) {
    const History& h = state.histories[static_cast<size_t>(j)];
    double best = std::numeric_limits<double>::infinity();
    for (const History::Record& r : h.records) best = std::min(best, r.risk);
    if (!std::isfinite(best)) continue;  // every training failed
    std::vector<int> ties;
    for (int i = 0; i < h.size(); ++i) {
      if (h.records[static_cast<size_t>(i)].risk == best) ties.push_back(i);
    }
    int pick = ties.front();
    if (ties.size() > 1) {
      Rng rng(derive_seed(seed, kTieTag, static_cast<std::uint64_t>(j + 1)));
      pick = ties[static_cast<size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(ties.size()) - 1))];
    }
    weight_by_trained[pick] += 1.0 / static_cast<double>(n);
  }
  if (weight_by_trained.empty()) {
    throw NumericalError("finalize_ensemble: no history has a finite risk");
  }

  Ensemble ensemble;
  ensemble.task_kind = state.task_kind;
  for (const auto& [idx, weight] : weight_by_trained) {
    ensemble.members.push_back(
        {state.trained[static_cast<size_t>(idx)].second, weight});
  }
  return ensemble;
}

EsmboResult run_esmbo(const TuningProblem& problem, int budget, int ensemble_size,
                      std::uint64_t seed, const EsmboOptions& options,
                      const EsmboIterationCallback& callback) {
  if (budget < 1) throw std::invalid_argument("run_esmbo: budget must be >= 1");
  if (ensemble_size < 1) {
    throw std::invalid_argument("run_esmbo: ensemble_size must be >= 1");
  }
  const HyperParamSpace& space = problem.space();
  EnsembleRunState state = init_state(problem, ensemble_size, seed, options);
  std::vector<std::optional<GPModel>> warm(static_cast<size_t>(ensemble_size));

  while (state.train_count < budget) {
    const auto t0 = std::chrono::steady_clock::now();
    const int k = state.train_count + 1;
    const int v = round_robin_index(k, ensemble_size);
    auto& warm_v = warm[static_cast<size_t>(v - 1)];

    // The histories all contain every trained config, so suggest's duplicate
    // guard already steers away from the cache; a residual hit (exhausted
    // integer space) retrains, keeping train_count == budget exact.
    SuggestInfo info = suggest_ex(state.histories[static_cast<size_t>(v - 1)], space,
                                  seed, warm_v ? &*warm_v : nullptr);
    if (info.gp) warm_v = std::move(info.gp);
    observe(state, problem, info.config, callback, v, t0);
  }

  Ensemble ensemble = finalize_ensemble(state, derive_seed(seed, kFinalizeTag));
  return {std::move(ensemble), std::move(state)};
}

EsmboResult run_ers(const TuningProblem& problem, int budget, int ensemble_size,
                    std::uint64_t seed, const EsmboOptions& options,
                    const EsmboIterationCallback& callback) {
  if (budget < 1) throw std::invalid_argument("run_ers: budget must be >= 1");
  if (ensemble_size < 1) {
    throw std::invalid_argument("run_ers: ensemble_size must be >= 1");
  }
  EnsembleRunState state = init_state(problem, ensemble_size, seed, options);
  Rng rs_rng(derive_seed(seed, kRsTag));

  while (state.train_count < budget) {
    const auto t0 = std::chrono::steady_clock::now();
    observe(state, problem, problem.space().sample_uniform(rs_rng), callback,
            /*active_history=*/0, t0);
  }

  Ensemble ensemble = finalize_ensemble(state, derive_seed(seed, kFinalizeTag));
  return {std::move(ensemble), std::move(state)};
}

}  // namespace abopt
