#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "abopt/agnostic.hpp"
#include "abopt/rng.hpp"
#include "support/oracles.hpp"

using namespace abopt;

namespace {

// Constant-output stub used to exercise the decision rules.
class ConstPredictor final : public Predictor {
 public:
  explicit ConstPredictor(double value) : Predictor("const", {}), value_(value) {}
  double predict(const Eigen::VectorXd&) const override { return value_; }

 private:
  double value_;
};

Ensemble make_ensemble(TaskKind kind, std::vector<std::pair<double, double>> members) {
  Ensemble e;
  e.task_kind = kind;
  for (auto& [prediction, weight] : members) {
    e.members.push_back({std::make_shared<ConstPredictor>(prediction), weight});
  }
  return e;
}

const Eigen::VectorXd kX = Eigen::VectorXd::Zero(1);

}  // namespace

TEST_CASE("bootstrap of a single example is the identity") {
  const BootstrapWeights w = draw_bootstrap(1, std::uint64_t{5});
  REQUIRE(w.counts.size() == 1);
  CHECK(w.counts[0] == 1);
}

TEST_CASE("bootstrap counts always sum to m") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    CHECK(draw_bootstrap(17, seed).total() == 17);
  }
}

TEST_CASE("bootstrap count means match the multinomial expectation") {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 100000; ++seed) {
    sum += draw_bootstrap(10, derive_seed(999, seed)).counts[0];
  }
  CHECK(sum / 100000.0 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("weighted risk arithmetic") {
  Eigen::VectorXd row(2);
  row << 0.2, 0.4;
  BootstrapWeights w;
  w.counts = {1, 3};
  CHECK(weighted_risk(row, w) == doctest::Approx(0.35).epsilon(1e-15));

  // All-ones weights reduce to the plain mean.
  Eigen::VectorXd longer(4);
  longer << 0.1, 0.2, 0.3, 0.4;
  CHECK(weighted_risk(longer, uniform_weights(4)) == mean_loss(longer));

  // Concentrated weights pick out one example.
  BootstrapWeights conc;
  conc.counts = {0, 4};
  CHECK(weighted_risk(row, conc) == doctest::Approx(0.8).epsilon(1e-15));
  // (4 copies of 0.4) / 2 examples: risk on the resample of size m = 2
  BootstrapWeights conc2;
  conc2.counts = {2, 0};
  CHECK(weighted_risk(row, conc2) == doctest::Approx(0.2).epsilon(1e-15));

  BootstrapWeights bad;
  bad.counts = {1, 1, 1};
  CHECK_THROWS_AS(weighted_risk(row, bad), std::invalid_argument);
}

TEST_CASE("a dominating predictor always wins sample_best") {
  LossMatrix m;
  m.losses.resize(3, 4);
  m.losses << 0.0, 0.1, 0.0, 0.1,  //
      0.5, 0.6, 0.5, 0.6,          //
      0.9, 0.8, 0.7, 0.9;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    CHECK(sample_best(m, seed) == 0);
  }
}

TEST_CASE("identical rows split wins evenly") {
  LossMatrix m;
  m.losses.resize(2, 3);
  m.losses << 0.2, 0.5, 0.3,  //
      0.2, 0.5, 0.3;
  long wins0 = 0;
  const long n = 100000;
  for (long s = 0; s < n; ++s) {
    wins0 += sample_best(m, derive_seed(77, static_cast<std::uint64_t>(s))) == 0;
  }
  CHECK(static_cast<double>(wins0) / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("monte carlo posterior matches exact enumeration on a 3x3 matrix") {
  LossMatrix m;
  m.losses.resize(3, 3);
  m.losses << 0.1, 0.9, 0.5,  //
      0.8, 0.2, 0.4,          //
      0.3, 0.3, 0.6;
  const std::vector<double> exact = oracles::enumerate_best_posterior_3(m.losses);
  const BestPosterior posterior = estimate_best_posterior(m, 100000, 4242);
  double tv = 0.0;
  for (int g = 0; g < 3; ++g) {
    tv += std::abs(posterior.probs(g) - exact[static_cast<size_t>(g)]);
  }
  CHECK(0.5 * tv <= 0.02);
  CHECK(posterior.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("monte carlo posterior converges with more samples") {
  LossMatrix m;
  m.losses.resize(3, 3);
  m.losses << 0.1, 0.9, 0.5,  //
      0.8, 0.2, 0.4,          //
      0.3, 0.3, 0.6;
  const std::vector<double> exact = oracles::enumerate_best_posterior_3(m.losses);
  const auto tv_at = [&](long n) {
    const BestPosterior p = estimate_best_posterior(m, n, 777);
    double tv = 0.0;
    for (int g = 0; g < 3; ++g) tv += std::abs(p.probs(g) - exact[static_cast<size_t>(g)]);
    return 0.5 * tv;
  };
  CHECK(tv_at(100000) <= 0.02);
  CHECK(tv_at(100000) <= tv_at(100) + 1e-12);
}

TEST_CASE("dominated matrices give a one-hot posterior") {
  LossMatrix m;
  m.losses.resize(2, 3);
  m.losses << 0.1, 0.1, 0.1,  //
      0.9, 0.9, 0.9;
  const BestPosterior p = estimate_best_posterior(m, 2000, 9);
  CHECK(p.probs(0) == 1.0);
  CHECK(p.probs(1) == 0.0);
}

TEST_CASE("permutation-symmetric losses spread the posterior uniformly") {
  LossMatrix m;
  m.losses.resize(3, 3);
  m.losses << 0.1, 0.5, 0.9,  //
      0.9, 0.1, 0.5,          //
      0.5, 0.9, 0.1;
  const BestPosterior p = estimate_best_posterior(m, 60000, 123);
  for (int g = 0; g < 3; ++g) {
    CHECK(p.probs(g) == doctest::Approx(1.0 / 3.0).epsilon(0.05));
  }
}

TEST_CASE("adding a strictly dominated row leaves other win probabilities alone") {
  LossMatrix m;
  m.losses.resize(2, 3);
  m.losses << 0.1, 0.6, 0.3,  //
      0.4, 0.2, 0.5;
  const BestPosterior before = estimate_best_posterior(m, 50000, 31);
  LossMatrix extended;
  extended.losses.resize(3, 3);
  extended.losses.topRows(2) = m.losses;
  extended.losses.row(2) << 0.9, 0.95, 0.99;
  const BestPosterior after = estimate_best_posterior(extended, 50000, 31);
  CHECK(after.probs(2) == 0.0);
  for (int g = 0; g < 2; ++g) {
    CHECK(after.probs(g) == doctest::Approx(before.probs(g)).epsilon(0.01));
  }
}

TEST_CASE("posterior estimation validates its sample count") {
  LossMatrix m;
  m.losses = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(estimate_best_posterior(m, 0, 1), std::invalid_argument);
}

TEST_CASE("classification ensemble takes the weighted plurality") {
  const Ensemble e = make_ensemble(TaskKind::classification,
                                   {{0.0, 0.5}, {1.0, 0.3}, {0.0, 0.2}});
  CHECK(ensemble_predict_classification(e, kX) == 0.0);
  const Ensemble single = make_ensemble(TaskKind::classification, {{3.0, 1.0}});
  CHECK(ensemble_predict_classification(single, kX) == 3.0);
  const Ensemble tie = make_ensemble(
      TaskKind::classification,
      {{2.0, 1.0 / 3}, {0.0, 1.0 / 3}, {1.0, 1.0 / 3}});
  CHECK(ensemble_predict_classification(tie, kX) == 0.0);  // smallest label
  CHECK_THROWS_AS(ensemble_predict_classification(Ensemble{}, kX),
                  std::invalid_argument);
}

TEST_CASE("regression ensemble is the weight-normalized mean") {
  const Ensemble equal = make_ensemble(TaskKind::regression, {{1.0, 0.5}, {3.0, 0.5}});
  CHECK(ensemble_predict_regression(equal, kX) == doctest::Approx(2.0).epsilon(1e-15));
  const Ensemble single = make_ensemble(TaskKind::regression, {{1.7, 1.0}});
  CHECK(ensemble_predict_regression(single, kX) == 1.7);
  const Ensemble skewed = make_ensemble(TaskKind::regression, {{0.0, 0.25}, {4.0, 0.75}});
  CHECK(ensemble_predict_regression(skewed, kX) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(ensemble_predict(skewed, kX) == ensemble_predict_regression(skewed, kX));
}

TEST_CASE("loss matrices round-trip through csv") {
  LossMatrix m;
  m.losses.resize(2, 3);
  m.losses << 0.125, 1.0 / 3.0, 0.0,  //
      1e-9, 2.5, 0.7071067811865476;
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "abopt_losses.csv";
  m.save_csv(path.string());
  const LossMatrix back = LossMatrix::load_csv(path.string());
  CHECK(back.losses == m.losses);
  fs::remove(path);
}
