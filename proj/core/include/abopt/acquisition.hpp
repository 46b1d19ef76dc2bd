#pragma once

#include <cstdint>

#include "abopt/gp.hpp"
#include "abopt/space.hpp"

namespace abopt {

// Closed-form expected improvement for minimization:
//   EI = stdev * (d * Phi(d) + phi(d)),  d = (r_best - mean) / stdev,
// with the exact stdev -> 0 limit max(r_best - mean, 0).
double expected_improvement(double mean, double stdev, double r_best);

struct AcquisitionResult {
  HyperParamConfig config;
  double ei_value = 0.0;
  int n_restarts_used = 0;
  // False only when EI was flat everywhere and a uniformly random in-box
  // config was returned instead.
  bool converged = true;
};

// Global EI maximization: 512 Sobol candidates scored on the unit cube, the
// top 10 refined by bounded gradient ascent (numeric gradient, 100 steps max,
// step tolerance 1e-6). Integer dimensions are snapped at the end and the
// reported ei_value is evaluated at the returned config. Deterministic per
// seed; candidate reduction breaks EI ties lexicographically.
AcquisitionResult maximize_ei(const GPModel& gp, const HyperParamSpace& space,
                              double r_best, std::uint64_t seed);

}  // namespace abopt
