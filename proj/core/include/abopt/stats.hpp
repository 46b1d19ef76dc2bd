#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace abopt {

// Test risks of K methods (rows) across L datasets (columns). Entries must be
// finite.
struct RiskTable {
  Eigen::MatrixXd risks;

  RiskTable() = default;
  explicit RiskTable(Eigen::MatrixXd r);

  int num_methods() const { return static_cast<int>(risks.rows()); }
  int num_datasets() const { return static_cast<int>(risks.cols()); }
};

// Rank of each method on one dataset: rank_i = #{l : risk_l <= risk_i}, so the
// strict best gets 1 and exact ties share the larger rank.
std::vector<int> rank_on_dataset(const Eigen::VectorXd& risks);

// Mean per-dataset rank, one entry per method (lower is better).
Eigen::VectorXd expected_rank(const RiskTable& table);

// Fraction of datasets where method i strictly beats method l; ties contribute
// 0.5 to each side, so win_frequency(i, l) + win_frequency(l, i) == 1.
double win_frequency(const RiskTable& table, int i, int l);

// One-sided binomial tail p-value for i's wins over l, ties discarded:
// p = sum_{w' >= w} C(n, w') 2^-n over the n non-tied datasets.
double sign_test(const RiskTable& table, int i, int l);

// Posterior probability that i's true win rate over l exceeds 0.5 under a
// Beta posterior with uniform prior; ties add 0.5 pseudo-counts to each side.
// Thresholds: > 0.8 significant, > 0.9 highly significant.
double pb_test(const RiskTable& table, int i, int l);

// Sliding-window mean over the iteration axis, window truncated at the start.
std::vector<double> smoothed_series(const std::vector<double>& series,
                                    int window = 15);

// Rounds to the given number of significant digits; stabilizes tie detection
// across runs. Non-finite values pass through.
double quantize_sig(double x, int digits = 12);

struct ComparisonReport {
  std::vector<std::string> methods;
  Eigen::VectorXd expected_ranks;
  Eigen::MatrixXd win_freq;
  Eigen::MatrixXd pb_prob;
  Eigen::MatrixXd sign_p;
  // 0 = not significant, 1 = significant, 2 = highly significant.
  Eigen::MatrixXi pb_level;
  Eigen::MatrixXi sign_level;
};

ComparisonReport build_report(const RiskTable& table,
                              std::vector<std::string> methods);

}  // namespace abopt
