#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "abopt/acquisition.hpp"
#include "abopt/gp.hpp"
#include "abopt/learners.hpp"
#include "abopt/space.hpp"

namespace abopt {

// Sobol initial-design points evaluated before the first GP fit.
inline constexpr int kInitialDesignSize = 3;

struct SuggestInfo {
  HyperParamConfig config;
  bool from_initial_design = false;
  bool ei_converged = true;
  double ei_value = 0.0;
  // The GP fitted for this suggestion, when one was; callers may thread it
  // back in as the warm start for the next call.
  std::optional<GPModel> gp;
};

// Next configuration to evaluate: the (size+1)-th Sobol design point while the
// history is shorter than the initial design (or holds no finite risk), else
// the EI maximizer of a GP fitted on the finite records. Never returns a
// config whose normalized image matches an evaluated one within 1e-9; a
// perturbation fallback (uniform noise of width 1e-3 in normalized units,
// widened on repeated collisions) applies. Pure function of (history, seed).
HyperParamConfig suggest(const History& history, const HyperParamSpace& space,
                         std::uint64_t seed);
SuggestInfo suggest_ex(const History& history, const HyperParamSpace& space,
                       std::uint64_t seed, const GPModel* warm_start);

struct IterationRecord {
  int iteration = 0;  // 1-based, contiguous
  double wall_time_ms = 0.0;
  const EvalOutcome* outcome = nullptr;  // valid only during the callback
};
using IterationCallback = std::function<void(const IterationRecord&)>;

struct RunResult {
  HyperParamConfig best_config;
  PredictorPtr best_predictor;
  double best_risk = std::numeric_limits<double>::infinity();
  History history;
};

// Algorithm: loop budget times (suggest, train, observe), then return the
// history argmin (earliest record wins ties). Exactly `budget` trainings;
// failed trainings stay in the history as +inf sentinels and are excluded
// from GP fitting.
RunResult run_smbo(const TuningProblem& problem, int budget, std::uint64_t seed,
                   const IterationCallback& callback = {});

// Same contract with per-scale uniform sampling instead of the GP suggestion.
RunResult run_random_search(const TuningProblem& problem, int budget,
                            std::uint64_t seed,
                            const IterationCallback& callback = {});

// True when the normalized images of the config and some history record agree
// within 1e-9 in every coordinate.
bool is_duplicate_config(const HyperParamSpace& space, const HyperParamConfig& config,
                         const History& history);

}  // namespace abopt
