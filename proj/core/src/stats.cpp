#include "abopt/stats.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace abopt {

RiskTable::RiskTable(Eigen::MatrixXd r) : risks(std::move(r)) {
  if (risks.rows() < 1 || risks.cols() < 1) {
    throw std::invalid_argument("RiskTable: needs at least one method and dataset");
  }
  if (!risks.allFinite()) {
    throw std::invalid_argument("RiskTable: entries must be finite");
  }
}

std::vector<int> rank_on_dataset(const Eigen::VectorXd& risks) {
  const int k = static_cast<int>(risks.size());
  std::vector<int> ranks(static_cast<size_t>(k), 0);
  for (int i = 0; i < k; ++i) {
    int rank = 0;
    for (int l = 0; l < k; ++l) {
      if (risks(l) <= risks(i)) ++rank;
    }
    ranks[static_cast<size_t>(i)] = rank;
  }
  return ranks;
}

Eigen::VectorXd expected_rank(const RiskTable& table) {
  const int k = table.num_methods();
  const int n = table.num_datasets();
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(k);
  for (int j = 0; j < n; ++j) {
    const std::vector<int> ranks = rank_on_dataset(table.risks.col(j));
    for (int i = 0; i < k; ++i) sums(i) += static_cast<double>(ranks[static_cast<size_t>(i)]);
  }
  return sums / static_cast<double>(n);
}

namespace {

struct PairRecord {
  int wins = 0;
  int losses = 0;
  int ties = 0;
};

PairRecord tally(const RiskTable& table, int i, int l) {
  PairRecord rec;
  for (int j = 0; j < table.num_datasets(); ++j) {
    const double a = table.risks(i, j);
    const double b = table.risks(l, j);
    if (a < b) {
      ++rec.wins;
    } else if (a > b) {
      ++rec.losses;
    } else {
      ++rec.ties;
    }
  }
  return rec;
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double win_frequency(const RiskTable& table, int i, int l) {
  const PairRecord rec = tally(table, i, l);
  return (static_cast<double>(rec.wins) + 0.5 * static_cast<double>(rec.ties)) /
         static_cast<double>(table.num_datasets());
}

double sign_test(const RiskTable& table, int i, int l) {
  const PairRecord rec = tally(table, i, l);
  const int n = rec.wins + rec.losses;  // tied datasets are discarded
  double p = 0.0;
  const double log_half_n = static_cast<double>(n) * std::log(0.5);
  for (int w = rec.wins; w <= n; ++w) {
    p += std::exp(log_choose(n, w) + log_half_n);
  }
  return std::min(p, 1.0);
}

double pb_test(const RiskTable& table, int i, int l) {
  const PairRecord rec = tally(table, i, l);
  const double a = static_cast<double>(rec.wins) + 0.5 * rec.ties + 1.0;
  const double b = static_cast<double>(rec.losses) + 0.5 * rec.ties + 1.0;
  return boost::math::ibetac(a, b, 0.5);  // posterior mass above 0.5
}

std::vector<double> smoothed_series(const std::vector<double>& series, int window) {
  if (window < 1) throw std::invalid_argument("smoothed_series: window must be >= 1");
  std::vector<double> out(series.size());
  double running = 0.0;
  for (size_t t = 0; t < series.size(); ++t) {
    running += series[t];
    if (t >= static_cast<size_t>(window)) running -= series[t - static_cast<size_t>(window)];
    const auto len = std::min<size_t>(t + 1, static_cast<size_t>(window));
    out[t] = running / static_cast<double>(len);
  }
  return out;
}

double quantize_sig(double x, int digits) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

ComparisonReport build_report(const RiskTable& table, std::vector<std::string> methods) {
  const int k = table.num_methods();
  if (static_cast<int>(methods.size()) != k) {
    throw std::invalid_argument("build_report: method-name count mismatch");
  }
  ComparisonReport report;
  report.methods = std::move(methods);
  report.expected_ranks = expected_rank(table);
  report.win_freq.resize(k, k);
  report.pb_prob.resize(k, k);
  report.sign_p.resize(k, k);
  report.pb_level.resize(k, k);
  report.sign_level.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int l = 0; l < k; ++l) {
      const double rho = win_frequency(table, i, l);
      const double pb = pb_test(table, i, l);
      const double sp = sign_test(table, i, l);
      report.win_freq(i, l) = rho;
      report.pb_prob(i, l) = pb;
      report.sign_p(i, l) = sp;
      report.pb_level(i, l) = pb > 0.9 ? 2 : (pb > 0.8 ? 1 : 0);
      report.sign_level(i, l) = sp < 0.05 ? 2 : (sp < 0.1 ? 1 : 0);
    }
  }
  return report;
}

}  // namespace abopt
