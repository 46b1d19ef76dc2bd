#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abopt/learners.hpp"
#include "abopt/stats.hpp"

namespace abopt {

struct DatasetSpec {
  std::string generator;  // "linear", "friedman", "two_gaussians" or "csv"
  std::uint64_t seed = 0;
  int n_train = 100;
  int n_valid = 100;
  int n_test = 300;
  int n_features = 0;  // 0 keeps the generator default
  double noise = -1.0;  // < 0 keeps the generator default
  double separation = 2.0;
  std::string csv_path;
  bool classification = false;
  double train_fraction = 0.4;
  double valid_fraction = 0.3;
};

struct ProblemSpec {
  std::string id;
  std::string algorithm;  // "ridge", "kernel_ridge", "knn" or "synthetic"
  std::string objective;  // synthetic problems only
  std::string loss = "squared";
  DatasetSpec dataset;
};

// Instantiates the problem (generating or loading its dataset). Throws
// ConfigError for unknown algorithms, objectives, generators or losses.
TuningProblem make_problem(const ProblemSpec& spec);

struct BenchmarkConfig {
  std::vector<ProblemSpec> suite;
  std::vector<std::string> methods;  // subset of {"RS", "SMBO", "ERS", "ESMBO"}
  int budget = 150;
  int ensemble_size = 10;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  int window = 15;

  static BenchmarkConfig load(const std::string& path);  // ConfigError on parse
  void validate() const;                                 // ConfigError on bad fields
};

// One line of a JSON-lines run log.
struct RunRecord {
  std::string method;
  std::string problem;
  std::uint64_t seed = 0;
  int iteration = 0;
  std::vector<double> config;
  double valid_risk = std::numeric_limits<double>::infinity();
  double test_risk = std::numeric_limits<double>::infinity();
  double wall_time_ms = 0.0;
  bool failed = false;
  // ESMBO/ERS extensions; empty otherwise.
  int active_history = 0;
  std::vector<double> bootstrap_risks;
  std::vector<int> winners;
};

std::vector<RunRecord> read_run_log(const std::string& path);

// Runs every (method, problem, seed) cell, resuming past complete logs, then
// aggregates. Layout under the output directory:
//   config.json                      snapshot used by aggregation/resume
//   logs/<method>/<problem>/<seed>.jsonl
//   reports/*.csv, reports/report.json
// Cells run concurrently up to `jobs`; aggregation is a pure function of the
// logs, so re-running reproduces the reports byte-identically.
void run_benchmark(const BenchmarkConfig& config, int jobs = 1);

// Rebuilds reports/ from config.json and the logs.
void aggregate_output(const std::string& output_dir);

enum class ReportFormat { csv, json };

// Writes the paper-style pairwise table, rows and columns sorted by expected
// rank ascending: final_table.csv (cells "rho PS" where P/S are the PB/sign
// markers '-', 'o' or 'O') or report.json (numeric levels).
void emit_tables(const ComparisonReport& report, const std::string& dir,
                 ReportFormat format);

}  // namespace abopt
