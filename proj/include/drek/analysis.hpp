#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "drek/dense_matrix.hpp"
#include "drek/problems.hpp"
#include "drek/solvers.hpp"

namespace drek {

// Coupling beta_1 = alpha_1 / (1 - alpha_1) for alpha_1 in (0,1); the unique
// solution of beta_1 - alpha_1 = beta_1 * alpha_1.
double beta1_from_alpha1(double alpha1);

// Two-term recursion F_{k+1} <= a1 F_k + a2 F_{k-1} + a3 with F_1 = F_0.
struct RecursionSpec {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double f0 = 0.0;
  void validate() const;
};

struct RecursionRate {
  double q;        // contraction factor in (0,1)
  double epsilon;  // q - a1 >= 0; satisfies (a1 + epsilon) * epsilon = a2
};

RecursionRate recursion_q(const RecursionSpec& spec);

// Envelope q^{k-1} (1 + eps) F_0 + a3 / (1 - q) dominating the recursion for
// every k >= 1.
double recursion_bound(const RecursionSpec& spec, std::uint64_t k);

// All closed-form quantities of the expected-error analysis for a given
// operator spectrum, coupling alpha_1 and momentum. q and xi are only
// populated when the momentum lies below gamma_max, the feasibility
// threshold (1 - sqrt(delta)) / (2 sqrt(delta)).
struct BoundParams {
  double alpha1 = 0.5;
  double beta1 = 1.0;
  double delta = 0.0;
  double theta = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double momentum = 0.0;  // gamma
  double gamma_max = 0.0;
  double w = 0.0;  // 1 - lambda_min / ||A||_F^2
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double fro_norm_sq = 0.0;
  std::optional<double> q;
  std::optional<double> xi;
  bool momentum_in_range() const { return q.has_value(); }
};

BoundParams bound_params(const DenseMatrix& a, double alpha1, double momentum);
BoundParams bound_params_from_spectrum(double lambda_min, double lambda_max,
                                       double fro_norm_sq, double alpha1, double momentum);

// w^k * lambda_max * ||X*||_F^2: expected squared distance of Z from B_perp.
double z_error_bound(const BoundParams& params, double xstar_norm_sq, std::uint64_t k);

// q^k (1 + xi) ||X0 - X*||_F^2 + a3 / (1 - q) with the forcing term
// a3 = theta * w^k * lambda_max * ||X*||_F^2 evaluated at the same k as the
// bound (the literal statement; a3 is therefore k-dependent).
// Throws std::domain_error when the momentum is out of range.
double x_error_bound(const BoundParams& params, double x0_err_sq, double xstar_norm_sq,
                     std::uint64_t k);

struct EnvelopePoint {
  std::uint64_t iteration = 0;
  double observed = 0.0;  // mean over runs (or single-run value)
  double bound = 0.0;
  bool violation = false;
};

struct EnvelopeReport {
  std::vector<EnvelopePoint> x_points;
  std::vector<EnvelopePoint> z_points;
  // Single-run comparisons are informative only: the bounds hold in
  // expectation, not per path.
  bool informative_only = false;
  double slack = 1.0;
  std::size_t runs = 0;
  std::size_t violations() const;
};

// Exact per-iteration error moments estimated over independent solver runs
// with derived seeds; checkpoints are iteration counts.
struct MonteCarloStats {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> mean_x_err_sq;  // E ||X^(k) - X*||_F^2
  std::vector<double> mean_z_err_sq;  // E ||Z^(k) - B_perp||_F^2
  std::size_t runs = 0;
};

MonteCarloStats monte_carlo_errors(const Problem& problem, const SolverConfig& cfg,
                                   std::span<const std::uint64_t> checkpoints,
                                   std::size_t runs);

// Compares Monte-Carlo means against the theoretical envelopes with a
// multiplicative statistical slack.
EnvelopeReport verify_monte_carlo(const MonteCarloStats& stats, const BoundParams& params,
                                  const Problem& problem, double slack = 1.05);

// Compares solver traces (their RSE checkpoints, converted to absolute
// squared errors) against the X-error envelope. With a single trace the
// report is marked informative-only.
EnvelopeReport verify_trace_against_bound(std::span<const ConvergenceTrace> traces,
                                          const BoundParams& params, const Problem& problem,
                                          double slack = 1.05);

}  // namespace drek
