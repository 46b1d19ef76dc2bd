#include <doctest.h>

#include <cmath>
#include <numbers>

#include "abopt/acquisition.hpp"
#include "abopt/rng.hpp"
#include "support/oracles.hpp"

using namespace abopt;

namespace {

HyperParamSpace unit_space(int dim) {
  std::vector<DimSpec> dims;
  for (int j = 0; j < dim; ++j) {
    dims.push_back({"u" + std::to_string(j), DimKind::continuous, DimScale::linear,
                    0.0, 1.0});
  }
  return HyperParamSpace(std::move(dims));
}

KernelParams params(double amplitude, int dim, double ell, double jitter) {
  return {amplitude, Eigen::VectorXd::Constant(dim, ell), jitter};
}

}  // namespace

TEST_CASE("expected improvement degenerate branches") {
  CHECK(expected_improvement(1.0, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(2.0, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(0.25, 0.0, 1.0) == 0.75);
}

TEST_CASE("expected improvement closed form at d = 0 and d = 1") {
  CHECK(expected_improvement(1.0, 1.0, 1.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
  // Phi(1) + phi(1) = 0.841344746... + 0.241970724...
  CHECK(expected_improvement(0.0, 1.0, 1.0) ==
        doctest::Approx(1.0833154705876864).epsilon(1e-9));
}

TEST_CASE("closed form matches a Monte Carlo estimate of the definition") {
  Rng rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const double mean = rng.uniform(-2.0, 2.0);
    const double stdev = rng.uniform(0.1, 3.0);
    const double r_best = rng.uniform(-2.0, 2.0);
    const auto [estimate, se] = oracles::mc_expected_improvement(
        mean, stdev, r_best, 200000, 1000 + static_cast<unsigned>(trial));
    const double closed = expected_improvement(mean, stdev, r_best);
    CHECK(std::abs(closed - estimate) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("EI is monotone in stdev and mean") {
  const double r_best = 0.5;
  for (double mean = -1.0; mean <= 2.0; mean += 0.25) {
    double prev = expected_improvement(mean, 1e-9, r_best);
    for (double s = 0.1; s <= 3.0; s += 0.1) {
      const double ei = expected_improvement(mean, s, r_best);
      CHECK(ei >= prev - 1e-12);
      prev = ei;
    }
  }
  for (double s = 0.1; s <= 2.0; s += 0.4) {
    double prev = expected_improvement(-2.0, s, r_best);
    for (double mean = -1.9; mean <= 2.0; mean += 0.1) {
      const double ei = expected_improvement(mean, s, r_best);
      CHECK(ei <= prev + 1e-12);
      prev = ei;
    }
  }
}

TEST_CASE("maximizer moves away from the observed point") {
  const HyperParamSpace space = unit_space(1);
  const GPModel gp(space, {{{0.5}}}, Eigen::VectorXd::Constant(1, 1.0),
                   params(1.0, 1, 0.3, 1e-10), 0.0);
  const AcquisitionResult res = maximize_ei(gp, space, 1.0, 3);
  CHECK(res.converged);
  CHECK(std::abs(res.config.values[0] - 0.5) >= 0.05);
  CHECK(res.ei_value > 0.0);
}

TEST_CASE("symmetric two-observation setup matches a dense grid oracle") {
  const HyperParamSpace space = unit_space(1);
  const GPModel gp(space, {{{0.25}}, {{0.75}}}, Eigen::VectorXd::Constant(2, 1.0),
                   params(1.0, 1, 0.2, 1e-10), 1.0);
  const double r_best = 1.0;
  const AcquisitionResult res = maximize_ei(gp, space, r_best, 17);

  double grid_best_u = 0.0, grid_best_ei = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double u = i / 10000.0;
    const auto [mean, variance] = gp.predict_normalized(Eigen::VectorXd::Constant(1, u));
    const double ei = expected_improvement(mean, std::sqrt(variance), r_best);
    if (ei > grid_best_ei) {
      grid_best_ei = ei;
      grid_best_u = u;
    }
  }
  const double found = res.config.values[0];
  const double mirrored = 1.0 - grid_best_u;
  CHECK(std::min(std::abs(found - grid_best_u), std::abs(found - mirrored)) <= 1e-2);
  CHECK(res.ei_value >= grid_best_ei - 1e-6);
}

TEST_CASE("maximize_ei is deterministic per seed") {
  const HyperParamSpace space = unit_space(2);
  const GPModel gp(space, {{{0.2, 0.3}}, {{0.7, 0.8}}, {{0.4, 0.9}}},
                   Eigen::Vector3d(1.0, 0.5, 0.8), params(1.0, 2, 0.4, 1e-8), 0.7);
  const AcquisitionResult a = maximize_ei(gp, space, 0.5, 5);
  const AcquisitionResult b = maximize_ei(gp, space, 0.5, 5);
  CHECK(a.config == b.config);
  CHECK(a.ei_value == b.ei_value);
  CHECK(a.n_restarts_used == b.n_restarts_used);
}

TEST_CASE("flat EI falls back to a random in-box config and flags it") {
  const HyperParamSpace space = unit_space(1);
  // One observation and an unbeatable incumbent far below anything the GP can
  // predict: EI underflows everywhere.
  const GPModel gp(space, {{{0.5}}}, Eigen::VectorXd::Constant(1, 0.0),
                   params(1e-6, 1, 10.0, 1e-10), 0.0);
  const AcquisitionResult res = maximize_ei(gp, space, -1e6, 11);
  CHECK_FALSE(res.converged);
  CHECK(res.n_restarts_used == 0);
  CHECK(space.contains(res.config));
}

TEST_CASE("returned configs respect the box and integer grids") {
  HyperParamSpace space({{"k", DimKind::integer, DimScale::linear, 1.0, 50.0},
                         {"w", DimKind::continuous, DimScale::log, 1e-3, 1e2}});
  std::vector<HyperParamConfig> configs = {{{5.0, 0.01}}, {{20.0, 1.0}}, {{40.0, 10.0}}};
  Eigen::Vector3d targets(0.3, 0.1, 0.5);
  const GPModel gp(space, configs, targets, params(1.0, 2, 0.5, 1e-8), 0.3);
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const AcquisitionResult res = maximize_ei(gp, space, 0.1, seed);
    REQUIRE(space.contains(res.config));
    CHECK(res.config.values[0] == std::floor(res.config.values[0]));
  }
}
