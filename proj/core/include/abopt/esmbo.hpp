#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "abopt/agnostic.hpp"
#include "abopt/learners.hpp"
#include "abopt/smbo.hpp"
#include "abopt/space.hpp"

namespace abopt {

// State of one ensemble run: N bootstrap-reweighted histories updated in
// lockstep, every trained predictor, and the per-config validation loss rows
// shared across histories.
struct EnsembleRunState {
  std::vector<History> histories;
  std::vector<BootstrapWeights> bootstrap_weights;
  std::map<HyperParamConfig, Eigen::VectorXd> loss_cache;
  std::vector<std::pair<HyperParamConfig, PredictorPtr>> trained;
  int train_count = 0;
  TaskKind task_kind = TaskKind::regression;
};

// Active history for the k-th training (both 1-based): ((k-1) mod N) + 1,
// cycling 1, ..., N, 1, ...
int round_robin_index(int k, int n);

struct EsmboOptions {
  // Replaces every bootstrap resample with the identity weights; with N = 1
  // this reduces the run to plain SMBO.
  bool uniform_weights = false;
};

struct EsmboIterationRecord {
  int iteration = 0;
  int active_history = 0;  // 1-based; 0 for ERS (no history issues suggestions)
  double wall_time_ms = 0.0;
  const EvalOutcome* outcome = nullptr;
  // Bootstrap risk of the new config under each history's weights.
  std::vector<double> bootstrap_risks;
  // Current winner per history as an index into `trained` (earliest-record
  // tie-break for logging; the finalize step re-breaks ties randomly). -1
  // when a history has no finite record yet.
  std::vector<int> winners;
};
using EsmboIterationCallback = std::function<void(const EsmboIterationRecord&)>;

// Per-history bootstrap-risk argmin, ties broken uniformly at random with
// seeds derived per history; winners aggregate into members of weight
// (histories won) / N, duplicates merged.
Ensemble finalize_ensemble(const EnsembleRunState& state, std::uint64_t seed);

struct EsmboResult {
  Ensemble ensemble;
  EnsembleRunState state;
};

// Ensemble construction by round-robin model-based optimization of N
// bootstrap-resampled validation histories. Every training's per-example
// losses are computed once and update all N histories, so exactly `budget`
// trainings happen regardless of N.
EsmboResult run_esmbo(const TuningProblem& problem, int budget, int ensemble_size,
                      std::uint64_t seed, const EsmboOptions& options = {},
                      const EsmboIterationCallback& callback = {});

// Random-search counterpart: uniformly sampled configs, bootstrap histories
// filled post hoc from the same loss cache, same finalize step.
EsmboResult run_ers(const TuningProblem& problem, int budget, int ensemble_size,
                    std::uint64_t seed, const EsmboOptions& options = {},
                    const EsmboIterationCallback& callback = {});

}  // namespace abopt
