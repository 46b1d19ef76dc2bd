// abopt command line: run benchmark suites, re-aggregate their logs, and emit
// comparison tables.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "abopt/errors.hpp"
#include "abopt/harness.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir, int jobs) {
  abopt::BenchmarkConfig config = abopt::BenchmarkConfig::load(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  abopt::run_benchmark(config, jobs);
  std::printf("wrote logs and reports under %s\n", config.output_dir.c_str());
  return 0;
}

int cmd_aggregate(const std::string& out_dir) {
  abopt::aggregate_output(out_dir);
  std::printf("rebuilt reports under %s\n",
              (std::filesystem::path(out_dir) / "reports").string().c_str());
  return 0;
}

int cmd_report(const std::string& out_dir, const std::string& format) {
  abopt::aggregate_output(out_dir);
  std::printf("emitted %s report under %s\n", format.c_str(),
              (std::filesystem::path(out_dir) / "reports").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-based hyperparameter optimization benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "Run a benchmark configuration");
  run->add_option("--config", config_path, "Benchmark config JSON")->required();
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  run->add_option("--jobs", jobs, "Concurrent (method, problem, seed) cells")
      ->check(CLI::PositiveNumber);

  CLI::App* aggregate =
      app.add_subcommand("aggregate", "Rebuild reports from existing logs");
  aggregate->add_option("--out", out_dir, "Benchmark output directory")->required();

  CLI::App* report = app.add_subcommand("report", "Emit comparison tables");
  report->add_option("--out", out_dir, "Benchmark output directory")->required();
  report->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, jobs);
    if (aggregate->parsed()) return cmd_aggregate(out_dir);
    return cmd_report(out_dir, format);
  } catch (const abopt::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
