#include "drek/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "drek/matrix_market.hpp"

namespace drek {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

ResidualMode parse_mode(const std::string& s) {
  if (s == "full-recompute") return ResidualMode::full_recompute;
  if (s == "incremental") return ResidualMode::incremental;
  throw std::runtime_error("config: unknown residual_mode '" + s + "'");
}

double method_gamma(const nlohmann::json& j) {
  if (j.contains("gamma")) return j.at("gamma").get<double>();
  if (j.contains("beta")) return j.at("beta").get<double>();  // experiment-table alias
  return 0.0;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::vector<double> GridSpec::points() const {
  std::vector<double> out;
  for (double g = lo; g <= hi + 1e-12; g += step) out.push_back(g);
  return out;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("version") && j.at("version").get<int>() != 1) {
    throw std::runtime_error("config: unsupported version");
  }
  if (j.contains("seed")) cfg.base_seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("repetitions")) cfg.repetitions = j.at("repetitions").get<std::size_t>();

  if (!j.contains("problem")) throw std::runtime_error("config: missing 'problem'");
  const auto& pj = j.at("problem");
  cfg.problem.kind = pj.at("kind").get<std::string>();
  if (pj.contains("m")) cfg.problem.m = pj.at("m").get<std::size_t>();
  if (pj.contains("n")) cfg.problem.n = pj.at("n").get<std::size_t>();
  if (pj.contains("p")) cfg.problem.p = pj.at("p").get<std::size_t>();
  if (pj.contains("mu")) cfg.problem.mu = pj.at("mu").get<double>();
  if (pj.contains("rank")) cfg.problem.rank = pj.at("rank").get<std::size_t>();
  if (pj.contains("path")) cfg.problem.path = pj.at("path").get<std::string>();
  if (pj.contains("transpose")) cfg.problem.transpose = pj.at("transpose").get<bool>();

  if (j.contains("methods")) {
    for (const auto& mj : j.at("methods")) {
      MethodSpec ms;
      ms.name = mj.at("name").get<std::string>();
      ms.gamma = method_gamma(mj);
      cfg.methods.push_back(ms);
    }
  }

  if (j.contains("solver")) {
    const auto& sj = j.at("solver");
    if (sj.contains("max_iterations"))
      cfg.solver.max_iterations = sj.at("max_iterations").get<std::uint64_t>();
    if (sj.contains("rse_tolerance"))
      cfg.solver.rse_tolerance = sj.at("rse_tolerance").get<double>();
    if (sj.contains("residual_mode"))
      cfg.solver.residual_mode = parse_mode(sj.at("residual_mode").get<std::string>());
    if (sj.contains("refresh_interval"))
      cfg.solver.refresh_interval = sj.at("refresh_interval").get<std::uint64_t>();
    if (sj.contains("rse_check_stride"))
      cfg.solver.rse_check_stride = sj.at("rse_check_stride").get<std::uint64_t>();
  }

  if (j.contains("grid")) {
    const auto& gj = j.at("grid");
    GridSpec grid;
    grid.lo = gj.at("lo").get<double>();
    grid.hi = gj.at("hi").get<double>();
    grid.step = gj.at("step").get<double>();
    if (gj.contains("budget")) grid.budget = gj.at("budget").get<std::uint64_t>();
    cfg.grid = grid;
  }

  if (j.contains("bounds")) {
    const auto& bj = j.at("bounds");
    if (bj.contains("alpha1"))
      cfg.bounds.alpha1_grid = bj.at("alpha1").get<std::vector<double>>();
    if (bj.contains("gamma")) cfg.bounds.gamma = bj.at("gamma").get<double>();
    if (bj.contains("beta")) cfg.bounds.gamma = bj.at("beta").get<double>();
    if (bj.contains("runs")) cfg.bounds.runs = bj.at("runs").get<std::size_t>();
    if (bj.contains("checkpoints"))
      cfg.bounds.checkpoints = bj.at("checkpoints").get<std::vector<std::uint64_t>>();
    if (bj.contains("slack")) cfg.bounds.slack = bj.at("slack").get<double>();
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw std::runtime_error("config: repetitions must be >= 1");
  solver.validate();
  static const std::vector<std::string> kinds = {"full-rank", "rank-deficient", "duplicated",
                                                 "matrix-market"};
  if (std::find(kinds.begin(), kinds.end(), problem.kind) == kinds.end()) {
    throw std::runtime_error("config: unknown problem kind '" + problem.kind + "'");
  }
  if (problem.kind == "matrix-market") {
    if (problem.path.empty()) throw std::runtime_error("config: matrix-market needs 'path'");
  } else if (problem.m == 0 || problem.n == 0) {
    throw std::runtime_error("config: generator needs positive m and n");
  }
  if (problem.p == 0) throw std::runtime_error("config: p must be positive");
  static const std::vector<std::string> names = {"drek", "mdrek", "rek-baseline", "rekdr"};
  for (const MethodSpec& m : methods) {
    if (std::find(names.begin(), names.end(), m.name) == names.end()) {
      throw std::runtime_error("config: unknown method '" + m.name + "'");
    }
    if (m.gamma < 0.0) throw std::runtime_error("config: momentum must be >= 0");
  }
  if (grid) {
    if (!(grid->step > 0.0)) throw std::runtime_error("config: grid step must be > 0");
    if (!(grid->lo < grid->hi)) throw std::runtime_error("config: grid lo must be < hi");
  }
  for (double a : bounds.alpha1_grid) {
    if (!(a > 0.0) || !(a < 1.0)) throw std::runtime_error("config: alpha1 must be in (0,1)");
  }
}

Problem build_problem(const ProblemSpec& spec, std::uint64_t seed) {
  if (spec.kind == "full-rank") {
    return gen_full_rank(spec.m, spec.n, spec.p, spec.mu, seed);
  }
  if (spec.kind == "rank-deficient") {
    return gen_rank_deficient(spec.m, spec.n, spec.p, spec.rank, spec.mu, seed);
  }
  if (spec.kind == "duplicated") {
    return gen_duplicated_columns(spec.m, spec.n, spec.p, spec.mu, seed);
  }
  if (spec.kind == "matrix-market") {
    DualSparseMatrix a = load_matrix_market(spec.path);
    std::string name = std::filesystem::path(spec.path).stem().string();
    if (spec.transpose) {
      a = a.transposed();
      name += "^T";
    }
    return build_problem_from_matrix(std::move(a), spec.p, spec.mu, seed, std::move(name));
  }
  throw std::runtime_error("unknown problem kind '" + spec.kind + "'");
}

SolveResult run_method(const MethodSpec& method, const Problem& problem, SolverConfig cfg) {
  if (method.name == "drek") return run_drek(problem, cfg);
  if (method.name == "mdrek") {
    cfg.momentum = method.gamma;
    return run_mdrek(problem, cfg);
  }
  if (method.name == "rek-baseline") return run_rek_baseline(problem, cfg);
  if (method.name == "rekdr") return run_rekdr(problem, cfg);
  throw std::runtime_error("unknown method '" + method.name + "'");
}

namespace {

void write_runs_csv(const std::filesystem::path& dir, const std::vector<RunRecord>& records) {
  auto out = open_out(dir / "runs.csv");
  out << "method,trial,seed,iterations,final_rse,elapsed_seconds,status\n";
  for (const RunRecord& r : records) {
    out << r.method << ',' << r.trial << ',' << r.seed << ',' << r.iterations << ','
        << fmt17(r.final_rse) << ',' << fmt17(r.elapsed_seconds) << ',' << r.status << '\n';
  }
}

void write_traces_csv(const std::filesystem::path& dir,
                      const std::vector<std::pair<RunRecord, ConvergenceTrace>>& traced) {
  auto out = open_out(dir / "traces.csv");
  out << "method,trial,iteration,rse,elapsed_seconds\n";
  for (const auto& [record, trace] : traced) {
    for (const TracePoint& pt : trace.points) {
      out << record.method << ',' << record.trial << ',' << pt.iteration << ','
          << fmt17(pt.rse) << ',' << fmt17(pt.elapsed_seconds) << '\n';
    }
  }
}

nlohmann::json meta_to_json(const ProblemMeta& meta) {
  return {
      {"name", meta.name},         {"m", meta.m},
      {"n", meta.n},               {"p", meta.p},
      {"rank", meta.rank},         {"density", meta.density},
      {"mu", meta.mu},             {"seed", meta.seed},
      {"lambda_min", meta.lambda_min}, {"lambda_max", meta.lambda_max},
      {"fro_norm_sq", meta.fro_norm_sq}, {"cond_nonzero", meta.cond},
  };
}

}  // namespace

RunOutput cmd_run(const ExperimentConfig& config, std::ostream& log) {
  if (config.methods.empty()) throw std::runtime_error("cmd_run: empty method list");
  std::filesystem::create_directories(config.out_dir);
  const Problem problem = build_problem(config.problem, config.base_seed);

  RunOutput output;
  std::vector<std::pair<RunRecord, ConvergenceTrace>> traced;

  for (const MethodSpec& method : config.methods) {
    double it_sum = 0.0, rse_sum = 0.0, elapsed_sum = 0.0;
    std::size_t ok = 0;
    for (std::size_t trial = 0; trial < config.repetitions; ++trial) {
      SolverConfig cfg = config.solver;
      cfg.seed = derive_run_seed(config.base_seed, method.name, trial);
      RunRecord record;
      record.method = method.name;
      record.trial = trial;
      record.seed = cfg.seed;
      try {
        SolveResult result = run_method(method, problem, cfg);
        record.iterations = result.iterations;
        record.final_rse = result.final_rse;
        record.elapsed_seconds = result.elapsed_seconds;
        record.status = to_string(result.status);
        it_sum += static_cast<double>(result.iterations);
        rse_sum += result.final_rse;
        elapsed_sum += result.elapsed_seconds;
        ++ok;
        traced.emplace_back(record, std::move(result.trace));
      } catch (const std::exception& e) {
        record.status = std::string("error: ") + e.what();
        log << "run " << method.name << "/" << trial << " failed: " << e.what() << "\n";
      }
      output.records.push_back(record);
    }
    MethodSummary summary;
    summary.method = method.name;
    summary.gamma = method.name == "mdrek" ? method.gamma : 0.0;
    summary.repetitions = ok;
    if (ok > 0) {
      summary.mean_iterations = it_sum / static_cast<double>(ok);
      summary.mean_final_rse = rse_sum / static_cast<double>(ok);
      summary.mean_elapsed_seconds = elapsed_sum / static_cast<double>(ok);
    }
    output.summaries.push_back(summary);
  }

  const std::filesystem::path dir(config.out_dir);
  write_runs_csv(dir, output.records);
  write_traces_csv(dir, traced);

  nlohmann::json summary_json;
  summary_json["config_version"] = 1;
  summary_json["problem"] = meta_to_json(problem.meta);
  summary_json["repetitions"] = config.repetitions;
  summary_json["seed"] = config.base_seed;
  nlohmann::json methods_json;
  for (const MethodSummary& s : output.summaries) {
    methods_json[s.method] = {
        {"gamma", s.gamma},
        {"mean_iterations", s.mean_iterations},
        {"mean_final_rse", s.mean_final_rse},
        {"mean_elapsed_seconds", s.mean_elapsed_seconds},
        {"completed_runs", s.repetitions},
    };
  }
  summary_json["methods"] = methods_json;
  open_out(dir / "summary.json") << summary_json.dump(2) << "\n";

  // Experiment-table style report.
  const auto& meta = problem.meta;
  log << meta.name << "  m=" << meta.m << " n=" << meta.n << " p=" << meta.p
      << " rank=" << meta.rank << " mu=" << meta.mu << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %8s %12s %12s\n", "method", "gamma", "mean IT",
                "mean CPU(s)");
  log << line;
  for (const MethodSummary& s : output.summaries) {
    std::snprintf(line, sizeof line, "%-14s %8.3g %12.1f %12.4f\n", s.method.c_str(), s.gamma,
                  s.mean_iterations, s.mean_elapsed_seconds);
    log << line;
  }
  return output;
}

GridOutput cmd_grid_search(const ExperimentConfig& config, std::ostream& log) {
  if (!config.grid) throw std::runtime_error("cmd_grid_search: missing grid spec");
  std::filesystem::create_directories(config.out_dir);
  const Problem problem = build_problem(config.problem, config.base_seed);

  SolverConfig base_cfg = config.solver;
  if (config.grid->budget > 0) base_cfg.max_iterations = config.grid->budget;

  GridOutput output;
  double best_rse = std::numeric_limits<double>::infinity();
  for (double gamma : config.grid->points()) {
    double it_sum = 0.0, rse_sum = 0.0;
    for (std::size_t trial = 0; trial < config.repetitions; ++trial) {
      SolverConfig cfg = base_cfg;
      cfg.momentum = gamma;
      // Shared per-trial seeds pair the rows across gamma values.
      cfg.seed = derive_run_seed(config.base_seed, "mdrek", trial);
      SolveResult result = run_mdrek(problem, cfg);
      it_sum += static_cast<double>(result.iterations);
      rse_sum += result.final_rse;
    }
    GridRow row;
    row.gamma = gamma;
    row.mean_final_rse = rse_sum / static_cast<double>(config.repetitions);
    row.mean_iterations = it_sum / static_cast<double>(config.repetitions);
    output.rows.push_back(row);
    if (row.mean_final_rse < best_rse) {
      best_rse = row.mean_final_rse;
      output.best_gamma = row.gamma;
    }
  }

  auto out = open_out(std::filesystem::path(config.out_dir) / "grid.csv");
  out << "gamma,mean_final_rse,mean_iterations\n";
  for (const GridRow& row : output.rows) {
    out << fmt17(row.gamma) << ',' << fmt17(row.mean_final_rse) << ','
        << fmt17(row.mean_iterations) << '\n';
  }
  log << "grid-search: best gamma = " << output.best_gamma
      << " (mean final RSE " << best_rse << ")\n";
  return output;
}

nlohmann::json cmd_bounds(const ExperimentConfig& config, std::ostream& log) {
  std::filesystem::create_directories(config.out_dir);
  const Problem problem = build_problem(config.problem, config.base_seed);
  if (problem.meta.lambda_min <= 0.0) {
    throw std::runtime_error("cmd_bounds: operator has no nonzero singular value");
  }

  SolverConfig cfg = config.solver;
  cfg.momentum = config.bounds.gamma;
  cfg.seed = config.base_seed;
  const MonteCarloStats stats =
      monte_carlo_errors(problem, cfg, config.bounds.checkpoints, config.bounds.runs);

  nlohmann::json doc;
  doc["problem"] = meta_to_json(problem.meta);
  doc["gamma"] = config.bounds.gamma;
  doc["monte_carlo_runs"] = config.bounds.runs;
  doc["slack"] = config.bounds.slack;
  doc["checkpoints"] = stats.checkpoints;

  std::size_t total_violations = 0;
  nlohmann::json per_alpha = nlohmann::json::array();
  for (double alpha1 : config.bounds.alpha1_grid) {
    const BoundParams params = bound_params_from_spectrum(
        problem.meta.lambda_min, problem.meta.lambda_max, problem.meta.fro_norm_sq, alpha1,
        config.bounds.gamma);
    const EnvelopeReport report =
        verify_monte_carlo(stats, params, problem, config.bounds.slack);
    total_violations += report.violations();

    nlohmann::json entry;
    entry["alpha1"] = params.alpha1;
    entry["beta1"] = params.beta1;
    entry["delta"] = params.delta;
    entry["theta"] = params.theta;
    entry["eta1"] = params.eta1;
    entry["eta2"] = params.eta2;
    entry["w"] = params.w;
    entry["gamma_max"] = params.gamma_max;
    entry["momentum_in_range"] = params.momentum_in_range();
    if (params.q) {
      entry["q"] = *params.q;
      entry["xi"] = *params.xi;
    } else {
      // Momentum out of range: report the zero-momentum contraction, for
      // which q = delta and xi = 0.
      const BoundParams at_zero = bound_params_from_spectrum(
          problem.meta.lambda_min, problem.meta.lambda_max, problem.meta.fro_norm_sq, alpha1,
          0.0);
      entry["gamma0_corollary"] = {{"q", *at_zero.q}, {"xi", *at_zero.xi}};
    }
    auto envelope_json = [](const std::vector<EnvelopePoint>& pts) {
      nlohmann::json arr = nlohmann::json::array();
      for (const EnvelopePoint& pt : pts) {
        arr.push_back({{"iteration", pt.iteration},
                       {"observed_mean", pt.observed},
                       {"bound", pt.bound},
                       {"violation", pt.violation}});
      }
      return arr;
    };
    entry["z_envelope"] = envelope_json(report.z_points);
    entry["x_envelope"] = envelope_json(report.x_points);
    entry["violations"] = report.violations();
    per_alpha.push_back(entry);
  }
  doc["alpha1_results"] = per_alpha;
  doc["total_violations"] = total_violations;
  doc["lambda_min"] = problem.meta.lambda_min;
  doc["lambda_max"] = problem.meta.lambda_max;
  doc["fro_norm_sq"] = problem.meta.fro_norm_sq;

  open_out(std::filesystem::path(config.out_dir) / "bounds.json") << doc.dump(2) << "\n";
  log << "bounds: " << total_violations << " envelope violation(s) across "
      << config.bounds.alpha1_grid.size() << " alpha1 value(s)\n";
  return doc;
}

void cmd_curves(const ExperimentConfig& config, std::ostream& log) {
  if (config.methods.empty()) throw std::runtime_error("cmd_curves: empty method list");
  std::filesystem::create_directories(config.out_dir);
  const Problem problem = build_problem(config.problem, config.base_seed);

  auto out = open_out(std::filesystem::path(config.out_dir) / "curves.csv");
  out << "method,iteration,median_rse,median_elapsed_seconds\n";

  for (const MethodSpec& method : config.methods) {
    std::vector<ConvergenceTrace> traces;
    for (std::size_t trial = 0; trial < config.repetitions; ++trial) {
      SolverConfig cfg = config.solver;
      cfg.seed = derive_run_seed(config.base_seed, method.name, trial);
      traces.push_back(run_method(method, problem, cfg).trace);
    }

    std::vector<std::uint64_t> iterations;
    for (const ConvergenceTrace& t : traces) {
      for (const TracePoint& pt : t.points) iterations.push_back(pt.iteration);
    }
    std::sort(iterations.begin(), iterations.end());
    iterations.erase(std::unique(iterations.begin(), iterations.end()), iterations.end());

    // Converged trials carry their final value forward so the medians cover
    // the full iteration range.
    std::vector<std::size_t> cursors(traces.size(), 0);
    for (std::uint64_t iteration : iterations) {
      std::vector<double> rses, times;
      for (std::size_t t = 0; t < traces.size(); ++t) {
        const auto& pts = traces[t].points;
        std::size_t& c = cursors[t];
        while (c + 1 < pts.size() && pts[c + 1].iteration <= iteration) ++c;
        rses.push_back(pts[c].rse);
        times.push_back(pts[c].elapsed_seconds);
      }
      out << method.name << ',' << iteration << ',' << fmt17(median_of(rses)) << ','
          << fmt17(median_of(times)) << '\n';
    }
  }
  log << "curves: wrote per-method median series for " << config.methods.size()
      << " method(s)\n";
}

}  // namespace drek
