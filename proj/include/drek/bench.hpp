#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drek/analysis.hpp"
#include "drek/problems.hpp"
#include "drek/solvers.hpp"

namespace drek {

struct ProblemSpec {
  std::string kind;  // full-rank | rank-deficient | duplicated | matrix-market
  std::size_t m = 0, n = 0, p = 0;
  double mu = 0.0;
  std::size_t rank = 0;       // rank-deficient only
  std::string path;           // matrix-market only
  bool transpose = false;     // matrix-market only
};

struct MethodSpec {
  std::string name;    // drek | mdrek | rek-baseline | rekdr
  double gamma = 0.0;  // mdrek only
};

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  // Iteration budget per grid run; 0 means the solver config's cap.
  std::uint64_t budget = 0;
  std::vector<double> points() const;
};

struct BoundsSpec {
  std::vector<double> alpha1_grid{0.5};
  double gamma = 0.0;
  std::size_t runs = 500;
  std::vector<std::uint64_t> checkpoints{1, 10, 50, 100};
  double slack = 1.05;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<MethodSpec> methods;
  std::size_t repetitions = 10;
  SolverConfig solver;
  std::uint64_t base_seed = 1;
  std::string out_dir = ".";
  std::optional<GridSpec> grid;
  BoundsSpec bounds;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  void validate() const;
};

struct RunRecord {
  std::string method;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;
  double final_rse = 0.0;
  double elapsed_seconds = 0.0;
  std::string status;
};

struct MethodSummary {
  std::string method;
  double gamma = 0.0;
  double mean_iterations = 0.0;
  double mean_final_rse = 0.0;
  double mean_elapsed_seconds = 0.0;
  std::size_t repetitions = 0;
};

struct RunOutput {
  std::vector<RunRecord> records;
  std::vector<MethodSummary> summaries;
};

struct GridRow {
  double gamma = 0.0;
  double mean_final_rse = 0.0;
  double mean_iterations = 0.0;
};

struct GridOutput {
  std::vector<GridRow> rows;
  double best_gamma = 0.0;
};

Problem build_problem(const ProblemSpec& spec, std::uint64_t seed);
SolveResult run_method(const MethodSpec& method, const Problem& problem, SolverConfig cfg);

// Subcommands. Each writes its files under config.out_dir and logs a short
// human-readable report to `log`. They throw std::runtime_error on config or
// I/O problems; per-run solver failures are recorded, not fatal.
RunOutput cmd_run(const ExperimentConfig& config, std::ostream& log);
GridOutput cmd_grid_search(const ExperimentConfig& config, std::ostream& log);
nlohmann::json cmd_bounds(const ExperimentConfig& config, std::ostream& log);
void cmd_curves(const ExperimentConfig& config, std::ostream& log);

}  // namespace drek
