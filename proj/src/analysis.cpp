#include "drek/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "drek/svd.hpp"

namespace drek {

double beta1_from_alpha1(double alpha1) {
  if (!(alpha1 > 0.0) || !(alpha1 < 1.0)) {
    throw std::invalid_argument("beta1_from_alpha1: alpha1 must lie in (0,1)");
  }
  return alpha1 / (1.0 - alpha1);
}

void RecursionSpec::validate() const {
  if (!(a1 >= 0.0) || !(a2 >= 0.0) || !(a3 >= 0.0)) {
    throw std::invalid_argument("RecursionSpec: coefficients must be non-negative");
  }
  if (!(a1 + a2 < 1.0)) {
    throw std::invalid_argument("RecursionSpec: a1 + a2 must be < 1");
  }
  if (!(a1 + a2 > 0.0)) {
    throw std::invalid_argument("RecursionSpec: a1 + a2 must be > 0");
  }
  if (!(f0 >= 0.0)) {
    throw std::invalid_argument("RecursionSpec: F0 must be non-negative");
  }
}

RecursionRate recursion_q(const RecursionSpec& spec) {
  spec.validate();
  if (spec.a2 == 0.0) {
    // Exact reduction: the quadratic collapses to q = a1, epsilon = 0.
    return {spec.a1, 0.0};
  }
  const double q = 0.5 * (spec.a1 + std::sqrt(spec.a1 * spec.a1 + 4.0 * spec.a2));
  return {q, q - spec.a1};
}

double recursion_bound(const RecursionSpec& spec, std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("recursion_bound: k must be >= 1");
  const RecursionRate rate = recursion_q(spec);
  return std::pow(rate.q, static_cast<double>(k - 1)) * (1.0 + rate.epsilon) * spec.f0 +
         spec.a3 / (1.0 - rate.q);
}

BoundParams bound_params_from_spectrum(double lambda_min, double lambda_max,
                                       double fro_norm_sq, double alpha1, double momentum) {
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min) || !(fro_norm_sq > 0.0)) {
    throw std::invalid_argument("bound_params: invalid spectrum");
  }
  if (!(momentum >= 0.0)) {
    throw std::invalid_argument("bound_params: momentum must be >= 0");
  }
  BoundParams p;
  p.alpha1 = alpha1;
  p.beta1 = beta1_from_alpha1(alpha1);
  p.lambda_min = lambda_min;
  p.lambda_max = lambda_max;
  p.fro_norm_sq = fro_norm_sq;
  p.momentum = momentum;
  p.delta = 1.0 - alpha1 * alpha1 * lambda_min / fro_norm_sq;
  p.theta = alpha1 * p.beta1 / fro_norm_sq + (1.0 + p.beta1) / lambda_min;
  p.eta1 = p.delta * (2.0 * momentum * momentum + 3.0 * momentum + 1.0);
  p.eta2 = p.delta * momentum * (2.0 * momentum + 1.0);
  p.w = 1.0 - lambda_min / fro_norm_sq;
  const double root = std::sqrt(p.delta);
  p.gamma_max = (1.0 - root) / (2.0 * root);
  if (momentum < p.gamma_max) {
    const RecursionRate rate = recursion_q({p.eta1, p.eta2, 0.0, 0.0});
    p.q = rate.q;
    p.xi = rate.epsilon;
  }
  return p;
}

BoundParams bound_params(const DenseMatrix& a, double alpha1, double momentum) {
  const SvdFactors f = svd(a);
  if (f.numerical_rank() == 0) {
    throw std::invalid_argument("bound_params: zero matrix");
  }
  return bound_params_from_spectrum(f.lambda_min(), f.lambda_max(), frobenius_norm_sq(a),
                                    alpha1, momentum);
}

double z_error_bound(const BoundParams& params, double xstar_norm_sq, std::uint64_t k) {
  return std::pow(params.w, static_cast<double>(k)) * params.lambda_max * xstar_norm_sq;
}

double x_error_bound(const BoundParams& params, double x0_err_sq, double xstar_norm_sq,
                     std::uint64_t k) {
  if (!params.q) {
    throw std::domain_error("x_error_bound: momentum at or above gamma_max");
  }
  const double a3 = params.theta * z_error_bound(params, xstar_norm_sq, k);
  return std::pow(*params.q, static_cast<double>(k)) * (1.0 + *params.xi) * x0_err_sq +
         a3 / (1.0 - *params.q);
}

std::size_t EnvelopeReport::violations() const {
  std::size_t count = 0;
  for (const auto& pt : x_points) count += pt.violation ? 1 : 0;
  for (const auto& pt : z_points) count += pt.violation ? 1 : 0;
  return count;
}

MonteCarloStats monte_carlo_errors(const Problem& problem, const SolverConfig& cfg,
                                   std::span<const std::uint64_t> checkpoints,
                                   std::size_t runs) {
  if (runs == 0) throw std::invalid_argument("monte_carlo_errors: runs must be >= 1");
  MonteCarloStats stats;
  stats.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  std::sort(stats.checkpoints.begin(), stats.checkpoints.end());
  stats.checkpoints.erase(
      std::unique(stats.checkpoints.begin(), stats.checkpoints.end()),
      stats.checkpoints.end());
  stats.mean_x_err_sq.assign(stats.checkpoints.size(), 0.0);
  stats.mean_z_err_sq.assign(stats.checkpoints.size(), 0.0);
  stats.runs = runs;
  if (stats.checkpoints.empty()) return stats;

  std::size_t first = 0;
  if (stats.checkpoints.front() == 0) {
    // Iteration 0 is deterministic: X = 0 and Z = B, so the errors are
    // ||X*||^2 and ||B - B_perp||^2 = ||B_hat||^2 in every run.
    stats.mean_x_err_sq[0] = problem.xstar_norm_sq * static_cast<double>(runs);
    stats.mean_z_err_sq[0] = frobenius_norm_sq(problem.b_hat) * static_cast<double>(runs);
    first = 1;
  }
  if (first == stats.checkpoints.size()) {
    for (double& v : stats.mean_x_err_sq) v /= static_cast<double>(runs);
    for (double& v : stats.mean_z_err_sq) v /= static_cast<double>(runs);
    return stats;
  }

  SolverConfig run_cfg = cfg;
  run_cfg.max_iterations = stats.checkpoints.back();
  // The moments are wanted at exact iteration counts, so the runs must not
  // stop early on the tolerance.
  run_cfg.rse_tolerance = 1e-300;
  run_cfg.rse_check_stride = stats.checkpoints.back();

  for (std::size_t run = 0; run < runs; ++run) {
    run_cfg.seed = RngStream::substream(cfg.seed, run).seed();
    std::size_t cursor = first;
    auto observer = [&](const SolverState& s) {
      while (cursor < stats.checkpoints.size() && stats.checkpoints[cursor] == s.k) {
        double x_err = 0.0;
        {
          auto dx = s.x.data();
          auto ds = problem.x_star.data();
          for (std::size_t idx = 0; idx < dx.size(); ++idx) {
            const double d = dx[idx] - ds[idx];
            x_err += d * d;
          }
        }
        double z_err = 0.0;
        {
          auto dz = s.z.data();
          auto dp = problem.b_perp.data();
          for (std::size_t idx = 0; idx < dz.size(); ++idx) {
            const double d = dz[idx] - dp[idx];
            z_err += d * d;
          }
        }
        stats.mean_x_err_sq[cursor] += x_err;
        stats.mean_z_err_sq[cursor] += z_err;
        ++cursor;
      }
    };
    run_mdrek(problem, run_cfg, observer);
  }
  for (double& v : stats.mean_x_err_sq) v /= static_cast<double>(runs);
  for (double& v : stats.mean_z_err_sq) v /= static_cast<double>(runs);
  return stats;
}

EnvelopeReport verify_monte_carlo(const MonteCarloStats& stats, const BoundParams& params,
                                  const Problem& problem, double slack) {
  EnvelopeReport report;
  report.slack = slack;
  report.runs = stats.runs;
  report.informative_only = stats.runs < 2;
  const double x0_err = problem.xstar_norm_sq;  // runs start from X0 = 0
  for (std::size_t idx = 0; idx < stats.checkpoints.size(); ++idx) {
    const std::uint64_t k = stats.checkpoints[idx];
    EnvelopePoint zp;
    zp.iteration = k;
    zp.observed = stats.mean_z_err_sq[idx];
    zp.bound = z_error_bound(params, problem.xstar_norm_sq, k);
    zp.violation = !report.informative_only && zp.observed > slack * zp.bound;
    report.z_points.push_back(zp);
    if (params.momentum_in_range()) {
      EnvelopePoint xp;
      xp.iteration = k;
      xp.observed = stats.mean_x_err_sq[idx];
      xp.bound = x_error_bound(params, x0_err, problem.xstar_norm_sq, k);
      xp.violation = !report.informative_only && xp.observed > slack * xp.bound;
      report.x_points.push_back(xp);
    }
  }
  return report;
}

EnvelopeReport verify_trace_against_bound(std::span<const ConvergenceTrace> traces,
                                          const BoundParams& params, const Problem& problem,
                                          double slack) {
  EnvelopeReport report;
  report.slack = slack;
  report.runs = traces.size();
  report.informative_only = traces.size() < 2;
  if (traces.empty()) return report;

  // Mean RSE per iteration over the traces; only iterations present in every
  // trace participate (runs may stop at different points).
  std::map<std::uint64_t, std::pair<double, std::size_t>> acc;
  for (const ConvergenceTrace& trace : traces) {
    for (const TracePoint& pt : trace.points) {
      auto& slot = acc[pt.iteration];
      slot.first += pt.rse;
      slot.second += 1;
    }
  }
  const double scale = problem.xstar_norm_sq > 0.0 ? problem.xstar_norm_sq : 1.0;
  for (const auto& [iteration, slot] : acc) {
    if (slot.second != traces.size()) continue;
    if (!params.momentum_in_range()) continue;
    EnvelopePoint xp;
    xp.iteration = iteration;
    xp.observed = slot.first / static_cast<double>(slot.second) * scale;
    xp.bound = x_error_bound(params, problem.xstar_norm_sq, problem.xstar_norm_sq, iteration);
    xp.violation = !report.informative_only && xp.observed > slack * xp.bound;
    report.x_points.push_back(xp);
  }
  return report;
}

}  // namespace drek
