#include <doctest.h>

#include <set>

#include "abopt/rng.hpp"
#include "abopt/sobol.hpp"
#include "support/oracles.hpp"

using namespace abopt;

TEST_CASE("sobol first dimension reproduces the base-2 radical inverse prefix") {
  const Eigen::MatrixXd p = sobol_points(1, 5);
  const double expected[] = {0.5, 0.25, 0.75, 0.125, 0.625};
  for (int i = 0; i < 5; ++i) CHECK(p(i, 0) == expected[i]);
}

TEST_CASE("sobol second dimension matches the classical sequence start") {
  const Eigen::MatrixXd p = sobol_points(2, 5);
  const double expected[] = {0.5, 0.75, 0.25, 0.625, 0.125};
  for (int i = 0; i < 5; ++i) CHECK(p(i, 1) == expected[i]);
}

TEST_CASE("single point lies in the unit cube for every supported dimension") {
  for (int dim = 1; dim <= kSobolMaxDim; ++dim) {
    const Eigen::MatrixXd p = sobol_points(dim, 1);
    REQUIRE(p.rows() == 1);
    for (int j = 0; j < dim; ++j) {
      CHECK(p(0, j) >= 0.0);
      CHECK(p(0, j) < 1.0);
    }
  }
}

TEST_CASE("unsupported dimension and bad arguments are rejected") {
  CHECK_THROWS_AS(sobol_points(kSobolMaxDim + 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(sobol_points(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(sobol_points(2, 0), std::invalid_argument);
}

TEST_CASE("scrambling is deterministic per seed and stays in the cube") {
  const Eigen::MatrixXd a = sobol_points(3, 64, 42);
  const Eigen::MatrixXd b = sobol_points(3, 64, 42);
  const Eigen::MatrixXd c = sobol_points(3, 64, 43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK((a.array() >= 0.0).all());
  CHECK((a.array() < 1.0).all());
}

TEST_CASE("scrambled points remain distinct within a block") {
  const Eigen::MatrixXd p = sobol_points(2, 128, 7);
  std::set<std::pair<double, double>> seen;
  for (int i = 0; i < p.rows(); ++i) seen.insert({p(i, 0), p(i, 1)});
  CHECK(seen.size() == 128);
}

TEST_CASE("star discrepancy beats uniform sampling in at least 9 of 10 seeds") {
  int sobol_wins = 0;
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const double d_sobol = oracles::star_discrepancy_2d(sobol_points(2, 256, seed));
    Rng rng(derive_seed(seed, 0xBEEF));
    Eigen::MatrixXd uniform(256, 2);
    for (int i = 0; i < 256; ++i) {
      uniform(i, 0) = rng.uniform01();
      uniform(i, 1) = rng.uniform01();
    }
    const double d_uniform = oracles::star_discrepancy_2d(uniform);
    sobol_wins += (d_sobol < d_uniform);
  }
  CHECK(sobol_wins >= 9);
}
