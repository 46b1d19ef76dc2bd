#include "abopt/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "abopt/agnostic.hpp"
#include "abopt/errors.hpp"
#include "abopt/esmbo.hpp"
#include "abopt/smbo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace abopt {
namespace {

const std::vector<std::string> kKnownMethods = {"RS", "SMBO", "ERS", "ESMBO"};

constexpr double kInf = std::numeric_limits<double>::infinity();

json risk_to_json(double x) { return std::isfinite(x) ? json(x) : json(); }

double risk_from_json(const json& j) { return j.is_null() ? kInf : j.get<double>(); }

std::string format_double(double x, const char* fmt = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

json dataset_to_json(const DatasetSpec& d) {
  json j;
  j["generator"] = d.generator;
  j["seed"] = d.seed;
  j["n_train"] = d.n_train;
  j["n_valid"] = d.n_valid;
  j["n_test"] = d.n_test;
  j["n_features"] = d.n_features;
  j["noise"] = d.noise;
  j["separation"] = d.separation;
  j["csv_path"] = d.csv_path;
  j["classification"] = d.classification;
  j["train_fraction"] = d.train_fraction;
  j["valid_fraction"] = d.valid_fraction;
  return j;
}

DatasetSpec dataset_from_json(const json& j) {
  DatasetSpec d;
  d.generator = j.value("generator", std::string());
  d.seed = j.value("seed", std::uint64_t{0});
  d.n_train = j.value("n_train", 100);
  d.n_valid = j.value("n_valid", 100);
  d.n_test = j.value("n_test", 300);
  d.n_features = j.value("n_features", 0);
  d.noise = j.value("noise", -1.0);
  d.separation = j.value("separation", 2.0);
  d.csv_path = j.value("csv_path", std::string());
  d.classification = j.value("classification", false);
  d.train_fraction = j.value("train_fraction", 0.4);
  d.valid_fraction = j.value("valid_fraction", 0.3);
  return d;
}

json problem_to_json(const ProblemSpec& p) {
  json j;
  j["id"] = p.id;
  j["algorithm"] = p.algorithm;
  j["objective"] = p.objective;
  j["loss"] = p.loss;
  j["dataset"] = dataset_to_json(p.dataset);
  return j;
}

ProblemSpec problem_from_json(const json& j) {
  ProblemSpec p;
  p.id = j.value("id", std::string());
  p.algorithm = j.value("algorithm", std::string());
  p.objective = j.value("objective", std::string());
  p.loss = j.value("loss", std::string("squared"));
  if (j.contains("dataset")) p.dataset = dataset_from_json(j.at("dataset"));
  return p;
}

json config_to_json(const BenchmarkConfig& c) {
  json j;
  json suite = json::array();
  for (const ProblemSpec& p : c.suite) suite.push_back(problem_to_json(p));
  j["suite"] = std::move(suite);
  j["methods"] = c.methods;
  j["budget"] = c.budget;
  j["ensemble_size"] = c.ensemble_size;
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  j["window"] = c.window;
  return j;
}

BenchmarkConfig config_from_json(const json& j) {
  BenchmarkConfig c;
  if (j.contains("suite")) {
    for (const json& p : j.at("suite")) c.suite.push_back(problem_from_json(p));
  }
  if (j.contains("methods")) {
    c.methods = j.at("methods").get<std::vector<std::string>>();
  }
  c.budget = j.value("budget", 150);
  c.ensemble_size = j.value("ensemble_size", 10);
  if (j.contains("seeds")) {
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  c.output_dir = j.value("output_dir", std::string());
  c.window = j.value("window", 15);
  return c;
}

fs::path log_path(const fs::path& out, const std::string& method,
                  const std::string& problem, std::uint64_t seed) {
  return out / "logs" / method / problem / (std::to_string(seed) + ".jsonl");
}

struct Cell {
  std::string method;
  const ProblemSpec* problem;
  std::uint64_t seed;
};

bool log_complete(const fs::path& path, const Cell& cell, int budget) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  int expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      return false;
    }
    if (j.value("method", std::string()) != cell.method ||
        j.value("problem", std::string()) != cell.problem->id ||
        j.value("seed", std::uint64_t{0}) != cell.seed ||
        j.value("iteration", -1) != expected) {
      return false;
    }
    ++expected;
  }
  return expected == budget + 1;
}

// Per-iteration ensemble test risk, combining memoized member predictions with
// the decision rules of the agnostic module (vote with smallest-label ties for
// classification, weighted mean otherwise).
class EnsembleTracker {
 public:
  explicit EnsembleTracker(const TuningProblem& problem) : problem_(problem) {
    if (!problem.is_synthetic()) {
      const Dataset& ds = problem.dataset();
      test_targets_.resize(static_cast<Eigen::Index>(ds.test_idx.size()));
      for (size_t e = 0; e < ds.test_idx.size(); ++e) {
        test_targets_(static_cast<Eigen::Index>(e)) = ds.y(ds.test_idx[e]);
      }
    }
  }

  void observe(const EvalOutcome& outcome) {
    if (outcome.failed) {
      test_predictions_.emplace_back();
      synthetic_risks_.push_back(kInf);
      return;
    }
    if (problem_.is_synthetic()) {
      test_predictions_.emplace_back();
      synthetic_risks_.push_back(outcome.valid_risk);
      return;
    }
    test_predictions_.push_back(outcome.test_predictions);
    synthetic_risks_.push_back(kInf);
  }

  double ensemble_test_risk(const std::vector<int>& winners) const {
    std::map<int, double> weights;
    const double share = 1.0 / static_cast<double>(winners.size());
    for (int w : winners) {
      if (w >= 0) weights[w] += share;
    }
    if (weights.empty()) return kInf;

    if (problem_.is_synthetic()) {
      double total = 0.0, acc = 0.0;
      for (const auto& [idx, weight] : weights) {
        acc += weight * synthetic_risks_[static_cast<size_t>(idx)];
        total += weight;
      }
      return acc / total;
    }

    const bool classify = problem_.dataset().classification &&
                          problem_.loss() == LossKind::zero_one;
    const Eigen::Index n = test_targets_.size();
    double loss_sum = 0.0;
    for (Eigen::Index e = 0; e < n; ++e) {
      double prediction;
      if (classify) {
        std::map<long, double> tally;
        for (const auto& [idx, weight] : weights) {
          tally[std::lround(test_predictions_[static_cast<size_t>(idx)](e))] += weight;
        }
        long best_label = tally.begin()->first;
        double best_weight = tally.begin()->second;
        for (const auto& [label, weight] : tally) {
          if (weight > best_weight) {
            best_weight = weight;
            best_label = label;
          }
        }
        prediction = static_cast<double>(best_label);
      } else {
        double total = 0.0, acc = 0.0;
        for (const auto& [idx, weight] : weights) {
          acc += weight * test_predictions_[static_cast<size_t>(idx)](e);
          total += weight;
        }
        prediction = acc / total;
      }
      loss_sum += loss_value(problem_.loss(), prediction, test_targets_(e));
    }
    return loss_sum / static_cast<double>(n);
  }

 private:
  const TuningProblem& problem_;
  Eigen::VectorXd test_targets_;
  std::vector<Eigen::VectorXd> test_predictions_;  // per trained index
  std::vector<double> synthetic_risks_;
};

void run_cell(const BenchmarkConfig& config, const Cell& cell) {
  const TuningProblem problem = make_problem(*cell.problem);
  const fs::path path =
      log_path(config.output_dir, cell.method, cell.problem->id, cell.seed);
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  std::ofstream out(tmp);
  if (!out) throw std::runtime_error("cannot write log " + tmp.string());

  const auto base_record = [&](int iteration, const EvalOutcome& outcome,
                               double test_risk, double wall_ms) {
    json j;
    j["method"] = cell.method;
    j["problem"] = cell.problem->id;
    j["seed"] = cell.seed;
    j["iteration"] = iteration;
    j["config"] = outcome.config.values;
    j["failed"] = outcome.failed;
    j["valid_risk"] = risk_to_json(outcome.failed ? kInf : outcome.valid_risk);
    j["test_risk"] = risk_to_json(test_risk);
    j["wall_time_ms"] = wall_ms;
    return j;
  };

  if (cell.method == "RS" || cell.method == "SMBO") {
    double best_risk = kInf;
    double best_test = kInf;
    const IterationCallback cb = [&](const IterationRecord& rec) {
      const EvalOutcome& o = *rec.outcome;
      if (!o.failed && o.valid_risk < best_risk) {
        best_risk = o.valid_risk;
        best_test = mean_loss(o.test_losses);
      }
      out << base_record(rec.iteration, o, best_test, rec.wall_time_ms).dump()
          << '\n';
    };
    if (cell.method == "RS") {
      run_random_search(problem, config.budget, cell.seed, cb);
    } else {
      run_smbo(problem, config.budget, cell.seed, cb);
    }
  } else {
    EnsembleTracker tracker(problem);
    const EsmboIterationCallback cb = [&](const EsmboIterationRecord& rec) {
      tracker.observe(*rec.outcome);
      json j = base_record(rec.iteration, *rec.outcome,
                           tracker.ensemble_test_risk(rec.winners),
                           rec.wall_time_ms);
      j["active_history"] = rec.active_history;
      json risks = json::array();
      for (double r : rec.bootstrap_risks) risks.push_back(risk_to_json(r));
      j["bootstrap_risks"] = std::move(risks);
      j["winners"] = rec.winners;
      out << j.dump() << '\n';
    };
    if (cell.method == "ESMBO") {
      run_esmbo(problem, config.budget, config.ensemble_size, cell.seed, {}, cb);
    } else {
      run_ers(problem, config.budget, config.ensemble_size, cell.seed, {}, cb);
    }
  }
  out.close();
  fs::rename(tmp, path);
}

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& names,
                      const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  out << "method";
  for (const std::string& n : names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << names[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
    out << '\n';
  }
}

char level_marker(int level) { return level == 2 ? 'O' : (level == 1 ? 'o' : '-'); }

std::vector<int> rank_order(const ComparisonReport& report) {
  std::vector<int> order(report.methods.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (report.expected_ranks(a) != report.expected_ranks(b)) {
      return report.expected_ranks(a) < report.expected_ranks(b);
    }
    return report.methods[static_cast<size_t>(a)] < report.methods[static_cast<size_t>(b)];
  });
  return order;
}

}  // namespace

TuningProblem make_problem(const ProblemSpec& spec) {
  if (spec.id.empty()) throw ConfigError("problem spec without id");
  if (spec.algorithm == "synthetic") {
    return TuningProblem::synthetic(spec.id, spec.objective);
  }

  const DatasetSpec& d = spec.dataset;
  Dataset dataset;
  if (d.generator == "linear") {
    dataset = make_linear_dataset(d.seed, d.n_train, d.n_valid, d.n_test,
                                  d.n_features > 0 ? d.n_features : 8,
                                  d.noise >= 0.0 ? d.noise : 0.5);
  } else if (d.generator == "friedman") {
    dataset = make_friedman_dataset(d.seed, d.n_train, d.n_valid, d.n_test,
                                    d.n_features > 0 ? d.n_features : 10,
                                    d.noise >= 0.0 ? d.noise : 1.0);
  } else if (d.generator == "two_gaussians") {
    dataset = make_two_gaussians_dataset(d.seed, d.n_train, d.n_valid, d.n_test,
                                         d.n_features > 0 ? d.n_features : 4,
                                         d.separation);
  } else if (d.generator == "csv") {
    dataset = load_csv_dataset(d.csv_path, d.classification, d.seed,
                               d.train_fraction, d.valid_fraction);
  } else {
    throw ConfigError("problem '" + spec.id + "': unknown dataset generator '" +
                      d.generator + "'");
  }

  LossKind loss;
  if (spec.loss == "squared") {
    loss = LossKind::squared;
  } else if (spec.loss == "zero_one") {
    loss = LossKind::zero_one;
  } else {
    throw ConfigError("problem '" + spec.id + "': unknown loss '" + spec.loss + "'");
  }
  return TuningProblem::learner(spec.id, spec.algorithm, std::move(dataset), loss);
}

BenchmarkConfig BenchmarkConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void BenchmarkConfig::validate() const {
  if (suite.empty()) throw ConfigError("config: empty suite");
  if (methods.empty()) throw ConfigError("config: no methods selected");
  if (seeds.empty()) throw ConfigError("config: no seeds");
  if (budget < 1) throw ConfigError("config: budget must be >= 1");
  if (ensemble_size < 1) throw ConfigError("config: ensemble_size must be >= 1");
  if (window < 1) throw ConfigError("config: window must be >= 1");

  std::set<std::string> seen_methods;
  for (const std::string& m : methods) {
    if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) ==
        kKnownMethods.end()) {
      throw ConfigError("config: unknown method '" + m + "'");
    }
    if (!seen_methods.insert(m).second) {
      throw ConfigError("config: duplicate method '" + m + "'");
    }
  }
  std::set<std::string> seen_ids;
  for (const ProblemSpec& p : suite) {
    if (!seen_ids.insert(p.id).second) {
      throw ConfigError("config: duplicate problem id '" + p.id + "'");
    }
  }
  std::set<std::uint64_t> seen_seeds(seeds.begin(), seeds.end());
  if (seen_seeds.size() != seeds.size()) {
    throw ConfigError("config: duplicate seeds");
  }
}

std::vector<RunRecord> read_run_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read log " + path);
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    RunRecord r;
    r.method = j.value("method", std::string());
    r.problem = j.value("problem", std::string());
    r.seed = j.value("seed", std::uint64_t{0});
    r.iteration = j.value("iteration", 0);
    r.config = j.at("config").get<std::vector<double>>();
    r.valid_risk = risk_from_json(j.at("valid_risk"));
    r.test_risk = risk_from_json(j.at("test_risk"));
    r.wall_time_ms = j.value("wall_time_ms", 0.0);
    r.failed = j.value("failed", false);
    r.active_history = j.value("active_history", 0);
    if (j.contains("bootstrap_risks")) {
      for (const json& b : j.at("bootstrap_risks")) {
        r.bootstrap_risks.push_back(risk_from_json(b));
      }
    }
    if (j.contains("winners")) r.winners = j.at("winners").get<std::vector<int>>();
    records.push_back(std::move(r));
  }
  return records;
}

void run_benchmark(const BenchmarkConfig& config, int jobs) {
  config.validate();
  if (config.output_dir.empty()) throw ConfigError("config: output_dir not set");
  // Fail on any unresolvable problem before the first run starts.
  for (const ProblemSpec& spec : config.suite) make_problem(spec);

  const fs::path out(config.output_dir);
  fs::create_directories(out);
  {
    std::ofstream snapshot(out / "config.json");
    snapshot << config_to_json(config).dump(2) << '\n';
  }

  std::vector<Cell> cells;
  for (const std::string& method : config.methods) {
    for (const ProblemSpec& p : config.suite) {
      for (std::uint64_t seed : config.seeds) {
        Cell cell{method, &p, seed};
        if (!log_complete(log_path(out, method, p.id, seed), cell, config.budget)) {
          cells.push_back(cell);
        }
      }
    }
  }

  const int n_workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        run_cell(config, cells[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  aggregate_output(config.output_dir);
}

void aggregate_output(const std::string& output_dir) {
  const fs::path out(output_dir);
  std::ifstream snapshot(out / "config.json");
  if (!snapshot) {
    throw std::runtime_error("aggregate: missing " + (out / "config.json").string());
  }
  json j;
  snapshot >> j;
  const BenchmarkConfig config = config_from_json(j);

  const int n_methods = static_cast<int>(config.methods.size());
  const int n_problems = static_cast<int>(config.suite.size());
  const int n_seeds = static_cast<int>(config.seeds.size());
  const int n_cols = n_problems * n_seeds;

  // series[m][col][iteration] = test risk of the current selection/ensemble.
  std::vector<std::vector<std::vector<double>>> series(
      static_cast<size_t>(n_methods),
      std::vector<std::vector<double>>(static_cast<size_t>(n_cols)));
  for (int m = 0; m < n_methods; ++m) {
    for (int p = 0; p < n_problems; ++p) {
      for (int s = 0; s < n_seeds; ++s) {
        const fs::path path =
            log_path(out, config.methods[static_cast<size_t>(m)],
                     config.suite[static_cast<size_t>(p)].id,
                     config.seeds[static_cast<size_t>(s)]);
        const std::vector<RunRecord> records = read_run_log(path.string());
        if (static_cast<int>(records.size()) != config.budget) {
          throw std::runtime_error("aggregate: incomplete log " + path.string());
        }
        std::vector<double>& cell = series[static_cast<size_t>(m)]
                                          [static_cast<size_t>(p * n_seeds + s)];
        cell.resize(static_cast<size_t>(config.budget));
        for (const RunRecord& r : records) {
          cell[static_cast<size_t>(r.iteration - 1)] = quantize_sig(r.test_risk);
        }
      }
    }
  }

  const fs::path reports = out / "reports";
  fs::create_directories(reports);

  // Final pairwise tables over all (problem, seed) columns.
  Eigen::MatrixXd final_risks(n_methods, n_cols);
  for (int m = 0; m < n_methods; ++m) {
    for (int c = 0; c < n_cols; ++c) {
      final_risks(m, c) =
          series[static_cast<size_t>(m)][static_cast<size_t>(c)].back();
    }
  }
  const ComparisonReport report =
      build_report(RiskTable(final_risks), config.methods);
  write_matrix_csv(reports / "win_freq.csv", config.methods, report.win_freq);
  write_matrix_csv(reports / "pb_prob.csv", config.methods, report.pb_prob);
  write_matrix_csv(reports / "sign_p.csv", config.methods, report.sign_p);
  {
    std::ofstream er(reports / "expected_rank.csv");
    er << "method,expected_rank\n";
    for (int m = 0; m < n_methods; ++m) {
      er << config.methods[static_cast<size_t>(m)] << ','
         << format_double(report.expected_ranks(m)) << '\n';
    }
  }
  emit_tables(report, reports.string(), ReportFormat::csv);
  emit_tables(report, reports.string(), ReportFormat::json);

  // Expected rank per seed (columns restricted to that seed), final iteration.
  {
    std::ofstream psr(reports / "per_seed_rank.csv");
    psr << "seed";
    for (const std::string& m : config.methods) psr << ',' << m;
    psr << '\n';
    for (int s = 0; s < n_seeds; ++s) {
      Eigen::MatrixXd risks(n_methods, n_problems);
      for (int m = 0; m < n_methods; ++m) {
        for (int p = 0; p < n_problems; ++p) {
          risks(m, p) = final_risks(m, p * n_seeds + s);
        }
      }
      const Eigen::VectorXd ranks = expected_rank(RiskTable(risks));
      psr << config.seeds[static_cast<size_t>(s)];
      for (int m = 0; m < n_methods; ++m) psr << ',' << format_double(ranks(m));
      psr << '\n';
    }
  }

  // Smoothed per-iteration series: expected rank per method and PB probability
  // per ordered pair, over columns where every method has an incumbent.
  std::vector<int> iterations;
  std::vector<std::vector<double>> rank_rows(static_cast<size_t>(n_methods));
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n_methods; ++i) {
    for (int l = 0; l < n_methods; ++l) {
      if (i != l) pairs.emplace_back(i, l);
    }
  }
  std::vector<std::vector<double>> pb_rows(pairs.size());
  for (int it = 0; it < config.budget; ++it) {
    std::vector<int> cols;
    for (int c = 0; c < n_cols; ++c) {
      bool all_finite = true;
      for (int m = 0; m < n_methods && all_finite; ++m) {
        all_finite = std::isfinite(
            series[static_cast<size_t>(m)][static_cast<size_t>(c)]
                  [static_cast<size_t>(it)]);
      }
      if (all_finite) cols.push_back(c);
    }
    if (cols.empty()) continue;
    Eigen::MatrixXd risks(n_methods, static_cast<Eigen::Index>(cols.size()));
    for (int m = 0; m < n_methods; ++m) {
      for (size_t c = 0; c < cols.size(); ++c) {
        risks(m, static_cast<Eigen::Index>(c)) =
            series[static_cast<size_t>(m)][static_cast<size_t>(cols[c])]
                  [static_cast<size_t>(it)];
      }
    }
    const RiskTable table(risks);
    const Eigen::VectorXd ranks = expected_rank(table);
    iterations.push_back(it + 1);
    for (int m = 0; m < n_methods; ++m) {
      rank_rows[static_cast<size_t>(m)].push_back(ranks(m));
    }
    for (size_t q = 0; q < pairs.size(); ++q) {
      pb_rows[q].push_back(pb_test(table, pairs[q].first, pairs[q].second));
    }
  }
  for (auto& row : rank_rows) row = smoothed_series(row, config.window);
  for (auto& row : pb_rows) row = smoothed_series(row, config.window);
  {
    std::ofstream rs(reports / "rank_series.csv");
    rs << "iteration";
    for (const std::string& m : config.methods) rs << ',' << m;
    rs << '\n';
    for (size_t t = 0; t < iterations.size(); ++t) {
      rs << iterations[t];
      for (int m = 0; m < n_methods; ++m) {
        rs << ',' << format_double(rank_rows[static_cast<size_t>(m)][t]);
      }
      rs << '\n';
    }
  }
  {
    std::ofstream ps(reports / "pb_series.csv");
    ps << "iteration";
    for (const auto& [i, l] : pairs) {
      ps << ',' << config.methods[static_cast<size_t>(i)] << '>'
         << config.methods[static_cast<size_t>(l)];
    }
    ps << '\n';
    for (size_t t = 0; t < iterations.size(); ++t) {
      ps << iterations[t];
      for (size_t q = 0; q < pairs.size(); ++q) {
        ps << ',' << format_double(pb_rows[q][t]);
      }
      ps << '\n';
    }
  }
}

void emit_tables(const ComparisonReport& report, const std::string& dir,
                 ReportFormat format) {
  const fs::path base(dir);
  fs::create_directories(base);
  const std::vector<int> order = rank_order(report);
  const int k = static_cast<int>(report.methods.size());

  if (format == ReportFormat::csv) {
    std::ofstream out(base / "final_table.csv");
    out << "method";
    for (int c : order) out << ',' << report.methods[static_cast<size_t>(c)];
    out << ",E[rank]\n";
    for (int r = 0; r < k; ++r) {
      const int i = order[static_cast<size_t>(r)];
      out << report.methods[static_cast<size_t>(i)];
      for (int c = 0; c < k; ++c) {
        const int l = order[static_cast<size_t>(c)];
        out << ',' << format_double(report.win_freq(i, l), "%.2f") << ' '
            << level_marker(report.pb_level(i, l))
            << level_marker(report.sign_level(i, l));
      }
      out << ',' << format_double(report.expected_ranks(i), "%.2f") << '\n';
    }
    return;
  }

  json j;
  json methods = json::array();
  json ranks = json::array();
  const auto matrix = [&](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < k; ++r) {
      json row = json::array();
      for (int c = 0; c < k; ++c) {
        row.push_back(m(order[static_cast<size_t>(r)], order[static_cast<size_t>(c)]));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  const auto imatrix = [&](const Eigen::MatrixXi& m) {
    json rows = json::array();
    for (int r = 0; r < k; ++r) {
      json row = json::array();
      for (int c = 0; c < k; ++c) {
        row.push_back(m(order[static_cast<size_t>(r)], order[static_cast<size_t>(c)]));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  for (int r = 0; r < k; ++r) {
    methods.push_back(report.methods[static_cast<size_t>(order[static_cast<size_t>(r)])]);
    ranks.push_back(report.expected_ranks(order[static_cast<size_t>(r)]));
  }
  j["methods"] = std::move(methods);
  j["expected_rank"] = std::move(ranks);
  j["win_freq"] = matrix(report.win_freq);
  j["pb_prob"] = matrix(report.pb_prob);
  j["sign_p"] = matrix(report.sign_p);
  j["pb_level"] = imatrix(report.pb_level);
  j["sign_level"] = imatrix(report.sign_level);
  std::ofstream out(base / "report.json");
  out << j.dump(1) << '\n';
}

}  // namespace abopt
