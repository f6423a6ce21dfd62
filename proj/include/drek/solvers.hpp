#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "drek/dense_matrix.hpp"
#include "drek/operator_ref.hpp"
#include "drek/problems.hpp"
#include "drek/rng.hpp"
#include "drek/sampling.hpp"

namespace drek {

enum class ResidualMode { full_recompute, incremental };
enum class RunStatus { converged, iteration_cap, degenerate };

const char* to_string(RunStatus status);
const char* to_string(ResidualMode mode);

struct SolverConfig {
  std::uint64_t max_iterations = 50'000;
  double rse_tolerance = 1e-6;
  double momentum = 0.0;  // extrapolation factor, >= 0
  std::uint64_t seed = 0;
  ResidualMode residual_mode = ResidualMode::full_recompute;
  std::uint64_t refresh_interval = 1000;  // incremental mode: full rebuild cadence
  std::uint64_t rse_check_stride = 1;
  void validate() const;
};

struct TracePoint {
  std::uint64_t iteration;
  double rse;
  double elapsed_seconds;
};

struct ConvergenceTrace {
  std::vector<TracePoint> points;
};

struct SolveResult {
  DenseMatrix x;
  ConvergenceTrace trace;
  RunStatus status = RunStatus::iteration_cap;
  std::uint64_t iterations = 0;
  double final_rse = 0.0;
  double elapsed_seconds = 0.0;
  // Scalar multiplications/divisions executed inside the iteration loop and
  // during one-time precomputation; the residual-mode comparison keys off
  // loop_mults / iterations.
  std::uint64_t loop_mults = 0;
  std::uint64_t setup_mults = 0;
  // Momentum exceeds the feasibility threshold derived from the problem
  // spectrum (warning only; the run still executes).
  bool momentum_out_of_range = false;
};

// Everything fixed over a run: the operator, right-hand side, squared
// row/column norms, and (incremental mode) the Gram matrices A^T A and
// A A^T whose columns drive the rank-1 residual updates.
struct SolverContext {
  OperatorRef a;
  const DenseMatrix* b = nullptr;
  std::vector<double> row_sq;
  std::vector<double> col_sq;
  ResidualMode mode = ResidualMode::full_recompute;
  DenseMatrix gram_cols;  // A^T A (incremental only)
  DenseMatrix gram_rows;  // A A^T (incremental only)
  std::uint64_t setup_mults = 0;
};

SolverContext make_context(OperatorRef a, const DenseMatrix& b, ResidualMode mode);

// Iterate triple plus residual caches. In full-recompute mode r_hat and r
// are rebuilt from their definitions every iteration; in incremental mode
// they evolve by rank-1 updates and are rebuilt every refresh_interval.
struct SolverState {
  DenseMatrix x;       // n x p
  DenseMatrix y;       // n x p momentum iterate (empty when momentum unused)
  DenseMatrix x_prev;  // n x p previous iterate (momentum only)
  DenseMatrix z;       // m x p
  DenseMatrix r_hat;   // n x p, A^T Z
  DenseMatrix r;       // m x p, B - A*{X or Y} - Z
  DenseMatrix a_it;    // m x p, A * {X or Y} (incremental only)
  DenseMatrix a_x;     // m x p, A * X (incremental momentum only)
  std::uint64_t k = 0;
  RngStream rng{0};
  std::uint64_t mults = 0;
  bool momentum = false;
  // scratch buffers reused across iterations
  std::vector<double> weights, prefix, row_buf;
};

SolverState init_state(const SolverContext& ctx, std::size_t p, std::uint64_t seed,
                       bool momentum);

// One column-space projection: samples j from the squared row norms of
// r_hat, drives A_{:,j}^T Z to zero. Returns the sampled column, or nullopt
// when ||r_hat|| == 0 (Z has converged; state unchanged). Consumes exactly
// one uniform draw either way.
std::optional<std::size_t> z_step(SolverState& s, const SolverContext& ctx);
void apply_z_update(SolverState& s, const SolverContext& ctx, std::size_t j);

// One row-space projection onto the cleaned system: samples i from the
// squared row norms of r, makes row i of A X match B - Z. nullopt when
// ||r|| == 0.
std::optional<std::size_t> x_step_drek(SolverState& s, const SolverContext& ctx);
void apply_x_update_drek(SolverState& s, const SolverContext& ctx, std::size_t i);

// Momentum variant: projects from Y instead of X, then extrapolates
// Y <- X_new + momentum * (X_new - X_old).
std::optional<std::size_t> x_step_mdrek(SolverState& s, const SolverContext& ctx,
                                        double momentum);
void apply_x_update_mdrek(SolverState& s, const SolverContext& ctx, std::size_t i,
                          double momentum);

// Rebuilds every cache from its definition (incremental-mode drift control).
void refresh_residuals(SolverState& s, const SolverContext& ctx);

void recompute_r_hat(SolverState& s, const SolverContext& ctx);
void recompute_r(SolverState& s, const SolverContext& ctx);

// RSE = ||x - x*||_F^2 / ||x*||_F^2; falls back to the absolute error
// ||x||_F^2 when x* = 0.
double compute_rse(const DenseMatrix& x, const DenseMatrix& x_star, double xstar_norm_sq);

// Called with the state after each completed iteration (state.k updated).
using IterationObserver = std::function<void(const SolverState&)>;

SolveResult run_drek(const Problem& problem, const SolverConfig& cfg,
                     const IterationObserver& observer = {});
SolveResult run_mdrek(const Problem& problem, const SolverConfig& cfg,
                      const IterationObserver& observer = {});
// Extended Kaczmarz comparator with static norm-based probabilities
// Pr(col=j) = ||A_{:,j}||^2/||A||_F^2, Pr(row=i) = ||A_{i,:}||^2/||A||_F^2.
SolveResult run_rek_baseline(const Problem& problem, const SolverConfig& cfg,
                             const IterationObserver& observer = {});

// Single right-hand-side specialization operating on plain vectors; always
// full recompute. Produces bitwise the same iterates as run_drek on the
// matching p = 1 problem under the same seed.
SolveResult run_rekdr(const Problem& problem, const SolverConfig& cfg);
SolveResult run_rekdr_vector(const DenseMatrix& a, const std::vector<double>& b,
                             const SolverConfig& cfg);

}  // namespace drek
