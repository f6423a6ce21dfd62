#include "drek/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "drek/svd.hpp"

namespace drek {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void fill_zero(DenseMatrix& m) {
  auto d = m.mutable_data();
  std::fill(d.begin(), d.end(), 0.0);
}

// weights[i] = squared norm of row i, written into a reusable buffer.
void row_sq_norms_into(const DenseMatrix& m, std::vector<double>& out) {
  out.resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row_data(i);
    double acc = 0.0;
    for (std::size_t t = 0; t < m.cols(); ++t) acc += row[t] * row[t];
    out[i] = acc;
  }
}

std::uint64_t operator_nnz(const OperatorRef& a) {
  if (!a.is_sparse()) return static_cast<std::uint64_t>(a.rows()) * a.cols();
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) acc += a.row_nnz(i);
  return acc;
}

// Momentum feasibility threshold (1 - sqrt(delta)) / (2 sqrt(delta)) at the
// default coupling alpha_1 = 1/2; used for the out-of-range warning only.
bool momentum_infeasible(const Problem& problem, double momentum) {
  if (momentum == 0.0) return false;
  if (problem.meta.fro_norm_sq <= 0.0 || problem.meta.lambda_min <= 0.0) return false;
  const double delta = 1.0 - 0.25 * problem.meta.lambda_min / problem.meta.fro_norm_sq;
  const double root = std::sqrt(delta);
  const double gamma_max = (1.0 - root) / (2.0 * root);
  return momentum >= gamma_max;
}

}  // namespace

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::iteration_cap: return "iteration-cap";
    case RunStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

const char* to_string(ResidualMode mode) {
  return mode == ResidualMode::full_recompute ? "full-recompute" : "incremental";
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations < 1");
  if (!(rse_tolerance > 0.0)) throw std::invalid_argument("SolverConfig: rse_tolerance <= 0");
  if (!(momentum >= 0.0)) throw std::invalid_argument("SolverConfig: momentum < 0");
  if (rse_check_stride < 1) throw std::invalid_argument("SolverConfig: rse_check_stride < 1");
  if (refresh_interval < 1) throw std::invalid_argument("SolverConfig: refresh_interval < 1");
}

SolverContext make_context(OperatorRef a, const DenseMatrix& b, ResidualMode mode) {
  if (!a.valid()) throw std::invalid_argument("solver: missing operator");
  if (a.rows() != b.rows()) throw std::invalid_argument("solver: A and B row counts disagree");
  SolverContext ctx;
  ctx.a = a;
  ctx.b = &b;
  ctx.mode = mode;
  ctx.row_sq = a.row_sq_norms();
  ctx.col_sq = a.col_sq_norms();
  const std::uint64_t nnz = operator_nnz(a);
  ctx.setup_mults = 2 * nnz;
  for (double v : ctx.row_sq) {
    if (!(v > 0.0)) throw std::invalid_argument("solver: A has an all-zero row");
  }
  for (double v : ctx.col_sq) {
    if (!(v > 0.0)) throw std::invalid_argument("solver: A has an all-zero column");
  }
  if (mode == ResidualMode::incremental) {
    ctx.gram_cols = a.gram_columns();
    ctx.gram_rows = a.gram_rows();
    ctx.setup_mults += nnz * (a.rows() + a.cols());
  }
  return ctx;
}

SolverState init_state(const SolverContext& ctx, std::size_t p, std::uint64_t seed,
                       bool momentum) {
  if (p == 0 || ctx.b->cols() != p) {
    throw std::invalid_argument("solver: right-hand side column count mismatch");
  }
  const std::size_t m = ctx.a.rows();
  const std::size_t n = ctx.a.cols();
  SolverState s;
  s.momentum = momentum;
  s.x = DenseMatrix(n, p);
  if (momentum) {
    s.y = s.x;
    s.x_prev = s.x;
  }
  s.z = *ctx.b;
  s.r_hat = DenseMatrix(n, p);
  s.r = DenseMatrix(m, p);
  s.rng = RngStream(seed);
  s.row_buf.assign(p, 0.0);
  s.weights.reserve(std::max(m, n));
  s.prefix.reserve(std::max(m, n));
  if (ctx.mode == ResidualMode::incremental) {
    s.a_it = DenseMatrix(m, p);
    if (momentum) s.a_x = DenseMatrix(m, p);
    refresh_residuals(s, ctx);
  }
  return s;
}

void recompute_r_hat(SolverState& s, const SolverContext& ctx) {
  fill_zero(s.r_hat);
  const std::size_t p = s.z.cols();
  if (!ctx.a.is_sparse()) {
    // Row-major accumulation: each output row still gathers its terms in
    // ascending row index of A, matching the column-form traversal bit for
    // bit while staying cache friendly.
    for (std::size_t i = 0; i < ctx.a.rows(); ++i) {
      const double* zrow = s.z.row_data(i);
      ctx.a.for_row(i, [&](std::size_t j, double av) {
        double* out = s.r_hat.row_data(j);
        for (std::size_t t = 0; t < p; ++t) out[t] += av * zrow[t];
      });
    }
  } else {
    for (std::size_t j = 0; j < ctx.a.cols(); ++j) {
      double* out = s.r_hat.row_data(j);
      ctx.a.for_col(j, [&](std::size_t i, double av) {
        const double* zrow = s.z.row_data(i);
        for (std::size_t t = 0; t < p; ++t) out[t] += av * zrow[t];
      });
    }
  }
  s.mults += operator_nnz(ctx.a) * p;
}

void recompute_r(SolverState& s, const SolverContext& ctx) {
  const DenseMatrix& iterate = s.momentum ? s.y : s.x;
  const std::size_t p = s.z.cols();
  for (std::size_t i = 0; i < ctx.a.rows(); ++i) {
    double* buf = s.row_buf.data();
    for (std::size_t t = 0; t < p; ++t) buf[t] = 0.0;
    ctx.a.for_row(i, [&](std::size_t l, double av) {
      const double* xrow = iterate.row_data(l);
      for (std::size_t t = 0; t < p; ++t) buf[t] += av * xrow[t];
    });
    const double* brow = ctx.b->row_data(i);
    const double* zrow = s.z.row_data(i);
    double* rrow = s.r.row_data(i);
    for (std::size_t t = 0; t < p; ++t) rrow[t] = brow[t] - buf[t] - zrow[t];
  }
  s.mults += operator_nnz(ctx.a) * p;
}

void refresh_residuals(SolverState& s, const SolverContext& ctx) {
  recompute_r_hat(s, ctx);
  if (ctx.mode == ResidualMode::incremental) {
    const DenseMatrix& iterate = s.momentum ? s.y : s.x;
    s.a_it = ctx.a.apply(iterate);
    s.mults += operator_nnz(ctx.a) * s.z.cols();
    if (s.momentum) {
      s.a_x = ctx.a.apply(s.x);
      s.mults += operator_nnz(ctx.a) * s.z.cols();
    }
    // r = B - A*iterate - Z from the fresh cache; additions only.
    const std::size_t p = s.z.cols();
    for (std::size_t i = 0; i < ctx.a.rows(); ++i) {
      const double* brow = ctx.b->row_data(i);
      const double* arow = s.a_it.row_data(i);
      const double* zrow = s.z.row_data(i);
      double* rrow = s.r.row_data(i);
      for (std::size_t t = 0; t < p; ++t) rrow[t] = brow[t] - arow[t] - zrow[t];
    }
  } else {
    recompute_r(s, ctx);
  }
}

void apply_z_update(SolverState& s, const SolverContext& ctx, std::size_t j) {
  const std::size_t p = s.z.cols();
  const bool incremental = ctx.mode == ResidualMode::incremental;
  const double inv = 1.0 / ctx.col_sq[j];
  double* u = s.row_buf.data();
  const double* rhj = s.r_hat.row_data(j);
  for (std::size_t t = 0; t < p; ++t) u[t] = rhj[t] * inv;
  s.mults += p + 1;

  ctx.a.for_col(j, [&](std::size_t i, double av) {
    double* zrow = s.z.row_data(i);
    double* rrow = incremental ? s.r.row_data(i) : nullptr;
    for (std::size_t t = 0; t < p; ++t) {
      const double d = av * u[t];
      zrow[t] -= d;
      if (incremental) rrow[t] += d;  // r = B - A*iterate - Z tracks -dZ
    }
  });
  s.mults += ctx.a.col_nnz(j) * p;

  if (incremental) {
    // r_hat = A^T Z picks up -(A^T A_{:,j}) u^T.
    const std::size_t n = ctx.a.cols();
    for (std::size_t l = 0; l < n; ++l) {
      const double g = ctx.gram_cols(l, j);
      double* row = s.r_hat.row_data(l);
      for (std::size_t t = 0; t < p; ++t) row[t] -= g * u[t];
    }
    s.mults += n * p;
  }
}

std::optional<std::size_t> z_step(SolverState& s, const SolverContext& ctx) {
  row_sq_norms_into(s.r_hat, s.weights);
  s.mults += static_cast<std::uint64_t>(s.r_hat.rows()) * s.r_hat.cols();
  build_prefix(s.weights, s.prefix);
  const auto j = sample_from_prefix(s.prefix, s.weights, s.rng);
  s.mults += 1;
  if (j) apply_z_update(s, ctx, *j);
  return j;
}

void apply_x_update_drek(SolverState& s, const SolverContext& ctx, std::size_t i) {
  const std::size_t p = s.z.cols();
  const double inv = 1.0 / ctx.row_sq[i];
  double* v = s.row_buf.data();
  const double* ri = s.r.row_data(i);
  for (std::size_t t = 0; t < p; ++t) v[t] = ri[t] * inv;
  s.mults += p + 1;

  ctx.a.for_row(i, [&](std::size_t l, double av) {
    double* xrow = s.x.row_data(l);
    for (std::size_t t = 0; t < p; ++t) xrow[t] += av * v[t];
  });
  s.mults += ctx.a.row_nnz(i) * p;

  if (ctx.mode == ResidualMode::incremental) {
    // A X gains (A A^T)_{:,i} v^T; r loses the same term.
    const std::size_t m = ctx.a.rows();
    for (std::size_t ii = 0; ii < m; ++ii) {
      const double h = ctx.gram_rows(ii, i);
      double* arow = s.a_it.row_data(ii);
      double* rrow = s.r.row_data(ii);
      for (std::size_t t = 0; t < p; ++t) {
        const double d = h * v[t];
        arow[t] += d;
        rrow[t] -= d;
      }
    }
    s.mults += m * p;
  }
}

std::optional<std::size_t> x_step_drek(SolverState& s, const SolverContext& ctx) {
  row_sq_norms_into(s.r, s.weights);
  s.mults += static_cast<std::uint64_t>(s.r.rows()) * s.r.cols();
  build_prefix(s.weights, s.prefix);
  const auto i = sample_from_prefix(s.prefix, s.weights, s.rng);
  s.mults += 1;
  if (i) apply_x_update_drek(s, ctx, *i);
  return i;
}

void apply_x_update_mdrek(SolverState& s, const SolverContext& ctx, std::size_t i,
                          double momentum) {
  const std::size_t p = s.z.cols();
  const double inv = 1.0 / ctx.row_sq[i];
  double* v = s.row_buf.data();
  const double* ri = s.r.row_data(i);
  for (std::size_t t = 0; t < p; ++t) v[t] = ri[t] * inv;
  s.mults += p + 1;

  // X_new = Y + A_{i,:}^T v^T, keeping the previous X for the extrapolation.
  s.x_prev.swap(s.x);
  s.x = s.y;
  ctx.a.for_row(i, [&](std::size_t l, double av) {
    double* xrow = s.x.row_data(l);
    for (std::size_t t = 0; t < p; ++t) xrow[t] += av * v[t];
  });
  s.mults += ctx.a.row_nnz(i) * p;

  // Y_new = X_new + momentum * (X_new - X_old).
  {
    auto xd = s.x.data();
    auto xp = s.x_prev.data();
    auto yd = s.y.mutable_data();
    for (std::size_t idx = 0; idx < xd.size(); ++idx) {
      yd[idx] = xd[idx] + momentum * (xd[idx] - xp[idx]);
    }
    s.mults += xd.size();
  }

  if (ctx.mode == ResidualMode::incremental) {
    // Same shape as the iterate update: A X_new = A Y_old + (A A^T)_{:,i} v^T,
    // A Y_new extrapolates, and r rebuilds from the fresh A Y cache.
    const std::size_t m = ctx.a.rows();
    for (std::size_t ii = 0; ii < m; ++ii) {
      const double h = ctx.gram_rows(ii, i);
      const double* brow = ctx.b->row_data(ii);
      const double* zrow = s.z.row_data(ii);
      double* ax = s.a_x.row_data(ii);
      double* ay = s.a_it.row_data(ii);
      double* rrow = s.r.row_data(ii);
      for (std::size_t t = 0; t < p; ++t) {
        const double w_new = ay[t] + h * v[t];
        const double v_new = w_new + momentum * (w_new - ax[t]);
        ax[t] = w_new;
        ay[t] = v_new;
        rrow[t] = brow[t] - v_new - zrow[t];
      }
    }
    s.mults += 2 * static_cast<std::uint64_t>(m) * p;
  }
}

std::optional<std::size_t> x_step_mdrek(SolverState& s, const SolverContext& ctx,
                                        double momentum) {
  row_sq_norms_into(s.r, s.weights);
  s.mults += static_cast<std::uint64_t>(s.r.rows()) * s.r.cols();
  build_prefix(s.weights, s.prefix);
  const auto i = sample_from_prefix(s.prefix, s.weights, s.rng);
  s.mults += 1;
  if (i) apply_x_update_mdrek(s, ctx, i.value(), momentum);
  return i;
}

double compute_rse(const DenseMatrix& x, const DenseMatrix& x_star, double xstar_norm_sq) {
  double err = 0.0;
  auto dx = x.data();
  auto ds = x_star.data();
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double d = dx[i] - ds[i];
    err += d * d;
  }
  // When the reference solution is zero the relative error is undefined and
  // the stopping rule degrades to the absolute error, which err already is.
  if (xstar_norm_sq > 0.0) return err / xstar_norm_sq;
  return err;
}

namespace {

SolveResult run_residual_driven(const Problem& problem, const SolverConfig& cfg, bool momentum,
                                const IterationObserver& observer) {
  cfg.validate();
  SolverContext ctx = make_context(problem.op(), problem.b, cfg.residual_mode);
  SolverState s = init_state(ctx, problem.meta.p, cfg.seed, momentum);

  SolveResult res;
  res.setup_mults = ctx.setup_mults + s.mults;
  s.mults = 0;
  if (momentum) res.momentum_out_of_range = momentum_infeasible(problem, cfg.momentum);

  const auto t0 = Clock::now();
  double rse = compute_rse(s.x, problem.x_star, problem.xstar_norm_sq);
  res.trace.points.push_back({0, rse, seconds_since(t0)});
  if (rse <= cfg.rse_tolerance) {
    res.status = RunStatus::converged;
    res.final_rse = rse;
    res.x = std::move(s.x);
    res.elapsed_seconds = seconds_since(t0);
    return res;
  }

  res.status = RunStatus::iteration_cap;
  std::uint64_t done = 0;
  for (std::uint64_t k = 0; k < cfg.max_iterations; ++k) {
    if (ctx.mode == ResidualMode::full_recompute) recompute_r_hat(s, ctx);
    const auto j = z_step(s, ctx);
    if (ctx.mode == ResidualMode::full_recompute) recompute_r(s, ctx);
    const auto i = momentum ? x_step_mdrek(s, ctx, cfg.momentum) : x_step_drek(s, ctx);

    done = k + 1;
    s.k = done;
    if (observer) observer(s);

    const bool frozen = !j && !i;
    if (done % cfg.rse_check_stride == 0 || done == cfg.max_iterations || frozen) {
      rse = compute_rse(s.x, problem.x_star, problem.xstar_norm_sq);
      s.mults += s.x.data().size() + 1;
      res.trace.points.push_back({done, rse, seconds_since(t0)});
      if (rse <= cfg.rse_tolerance) {
        res.status = RunStatus::converged;
        break;
      }
    }
    if (frozen) {
      // Both residuals vanished with the tolerance unmet: the iteration can
      // no longer move.
      res.status = RunStatus::degenerate;
      break;
    }
    if (ctx.mode == ResidualMode::incremental && done % cfg.refresh_interval == 0) {
      refresh_residuals(s, ctx);
    }
  }

  res.iterations = done;
  res.final_rse = rse;
  res.elapsed_seconds = seconds_since(t0);
  res.loop_mults = s.mults;
  res.x = std::move(s.x);
  return res;
}

}  // namespace

SolveResult run_drek(const Problem& problem, const SolverConfig& cfg,
                     const IterationObserver& observer) {
  return run_residual_driven(problem, cfg, /*momentum=*/false, observer);
}

SolveResult run_mdrek(const Problem& problem, const SolverConfig& cfg,
                      const IterationObserver& observer) {
  return run_residual_driven(problem, cfg, /*momentum=*/true, observer);
}

SolveResult run_rek_baseline(const Problem& problem, const SolverConfig& cfg,
                             const IterationObserver& observer) {
  cfg.validate();
  SolverContext ctx = make_context(problem.op(), problem.b, ResidualMode::full_recompute);
  SolverState s;
  const std::size_t n = ctx.a.cols();
  const std::size_t p = problem.meta.p;
  s.x = DenseMatrix(n, p);
  s.z = problem.b;
  s.rng = RngStream(cfg.seed);
  s.row_buf.assign(p, 0.0);

  // Static norm-based probabilities: prefix sums built once.
  std::vector<double> col_prefix, row_prefix;
  build_prefix(ctx.col_sq, col_prefix);
  build_prefix(ctx.row_sq, row_prefix);

  SolveResult res;
  res.setup_mults = ctx.setup_mults;

  const auto t0 = Clock::now();
  double rse = compute_rse(s.x, problem.x_star, problem.xstar_norm_sq);
  res.trace.points.push_back({0, rse, seconds_since(t0)});
  if (rse <= cfg.rse_tolerance) {
    res.status = RunStatus::converged;
    res.final_rse = rse;
    res.x = std::move(s.x);
    res.elapsed_seconds = seconds_since(t0);
    return res;
  }

  res.status = RunStatus::iteration_cap;
  std::vector<double> block(p, 0.0);
  std::uint64_t done = 0;
  for (std::uint64_t k = 0; k < cfg.max_iterations; ++k) {
    const auto j = sample_from_prefix(col_prefix, ctx.col_sq, s.rng);
    s.mults += 1;
    {
      // u = A_{:,j}^T Z / ||A_{:,j}||^2, then Z -= A_{:,j} u^T.
      double* u = block.data();
      for (std::size_t t = 0; t < p; ++t) u[t] = 0.0;
      ctx.a.for_col(*j, [&](std::size_t ii, double av) {
        const double* zrow = s.z.row_data(ii);
        for (std::size_t t = 0; t < p; ++t) u[t] += av * zrow[t];
      });
      const double inv = 1.0 / ctx.col_sq[*j];
      for (std::size_t t = 0; t < p; ++t) u[t] *= inv;
      s.mults += 2 * ctx.a.col_nnz(*j) * p + p + 1;
      ctx.a.for_col(*j, [&](std::size_t ii, double av) {
        double* zrow = s.z.row_data(ii);
        for (std::size_t t = 0; t < p; ++t) zrow[t] -= av * u[t];
      });
    }

    const auto i = sample_from_prefix(row_prefix, ctx.row_sq, s.rng);
    s.mults += 1;
    {
      // v = (B_{i,:} - Z_{i,:} - A_{i,:} X) / ||A_{i,:}||^2, then the row
      // update X += A_{i,:}^T v^T.
      double* v = block.data();
      for (std::size_t t = 0; t < p; ++t) v[t] = 0.0;
      ctx.a.for_row(*i, [&](std::size_t l, double av) {
        const double* xrow = s.x.row_data(l);
        for (std::size_t t = 0; t < p; ++t) v[t] += av * xrow[t];
      });
      const double* brow = problem.b.row_data(*i);
      const double* zrow = s.z.row_data(*i);
      const double inv = 1.0 / ctx.row_sq[*i];
      for (std::size_t t = 0; t < p; ++t) v[t] = (brow[t] - zrow[t] - v[t]) * inv;
      s.mults += 2 * ctx.a.row_nnz(*i) * p + p + 1;
      ctx.a.for_row(*i, [&](std::size_t l, double av) {
        double* xrow = s.x.row_data(l);
        for (std::size_t t = 0; t < p; ++t) xrow[t] += av * v[t];
      });
    }

    done = k + 1;
    s.k = done;
    if (observer) observer(s);

    if (done % cfg.rse_check_stride == 0 || done == cfg.max_iterations) {
      rse = compute_rse(s.x, problem.x_star, problem.xstar_norm_sq);
      s.mults += s.x.data().size() + 1;
      res.trace.points.push_back({done, rse, seconds_since(t0)});
      if (rse <= cfg.rse_tolerance) {
        res.status = RunStatus::converged;
        break;
      }
    }
  }

  res.iterations = done;
  res.final_rse = rse;
  res.elapsed_seconds = seconds_since(t0);
  res.loop_mults = s.mults;
  res.x = std::move(s.x);
  return res;
}

SolveResult run_rekdr(const Problem& problem, const SolverConfig& cfg) {
  cfg.validate();
  if (problem.meta.p != 1) {
    throw std::invalid_argument("run_rekdr: requires a single right-hand side (p = 1)");
  }
  SolverContext ctx = make_context(problem.op(), problem.b, ResidualMode::full_recompute);
  const std::size_t m = ctx.a.rows();
  const std::size_t n = ctx.a.cols();

  std::vector<double> x(n, 0.0), z(m), r_hat(n, 0.0), r(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) z[i] = problem.b(i, 0);
  RngStream rng(cfg.seed);
  std::vector<double> weights, prefix;
  weights.reserve(std::max(m, n));
  prefix.reserve(std::max(m, n));

  const double xstar_norm_sq = problem.xstar_norm_sq;
  auto vec_rse = [&]() {
    double err = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double d = x[l] - problem.x_star(l, 0);
      err += d * d;
    }
    if (xstar_norm_sq > 0.0) return err / xstar_norm_sq;
    return err;
  };

  SolveResult res;
  res.setup_mults = ctx.setup_mults;
  std::uint64_t mults = 0;

  const auto t0 = Clock::now();
  double rse = vec_rse();
  res.trace.points.push_back({0, rse, seconds_since(t0)});
  if (rse <= cfg.rse_tolerance) {
    res.status = RunStatus::converged;
    res.final_rse = rse;
    res.x = DenseMatrix(n, 1, std::move(x));
    res.elapsed_seconds = seconds_since(t0);
    return res;
  }

  res.status = RunStatus::iteration_cap;
  std::uint64_t done = 0;
  for (std::uint64_t k = 0; k < cfg.max_iterations; ++k) {
    // r_hat = A^T z, same traversal as the matrix path.
    std::fill(r_hat.begin(), r_hat.end(), 0.0);
    if (!ctx.a.is_sparse()) {
      for (std::size_t i = 0; i < m; ++i) {
        const double zi = z[i];
        ctx.a.for_row(i, [&](std::size_t jj, double av) { r_hat[jj] += av * zi; });
      }
    } else {
      for (std::size_t jj = 0; jj < n; ++jj) {
        ctx.a.for_col(jj, [&](std::size_t ii, double av) { r_hat[jj] += av * z[ii]; });
      }
    }
    mults += operator_nnz(ctx.a);

    weights.resize(n);
    for (std::size_t jj = 0; jj < n; ++jj) {
      double acc = 0.0;
      acc += r_hat[jj] * r_hat[jj];
      weights[jj] = acc;
    }
    mults += n;
    build_prefix(weights, prefix);
    const auto j = sample_from_prefix(prefix, weights, rng);
    mults += 1;
    if (j) {
      const double inv = 1.0 / ctx.col_sq[*j];
      const double u = r_hat[*j] * inv;
      mults += 2;
      ctx.a.for_col(*j, [&](std::size_t ii, double av) { z[ii] -= av * u; });
      mults += ctx.a.col_nnz(*j);
    }

    // r = b - A x - z against the updated z.
    for (std::size_t ii = 0; ii < m; ++ii) {
      double acc = 0.0;
      ctx.a.for_row(ii, [&](std::size_t l, double av) { acc += av * x[l]; });
      r[ii] = problem.b(ii, 0) - acc - z[ii];
    }
    mults += operator_nnz(ctx.a);

    weights.resize(m);
    for (std::size_t ii = 0; ii < m; ++ii) {
      double acc = 0.0;
      acc += r[ii] * r[ii];
      weights[ii] = acc;
    }
    mults += m;
    build_prefix(weights, prefix);
    const auto i = sample_from_prefix(prefix, weights, rng);
    mults += 1;
    if (i) {
      const double inv = 1.0 / ctx.row_sq[*i];
      const double v = r[*i] * inv;
      mults += 2;
      ctx.a.for_row(*i, [&](std::size_t l, double av) { x[l] += av * v; });
      mults += ctx.a.row_nnz(*i);
    }

    done = k + 1;
    const bool frozen = !j && !i;
    if (done % cfg.rse_check_stride == 0 || done == cfg.max_iterations || frozen) {
      rse = vec_rse();
      mults += n + 1;
      res.trace.points.push_back({done, rse, seconds_since(t0)});
      if (rse <= cfg.rse_tolerance) {
        res.status = RunStatus::converged;
        break;
      }
    }
    if (frozen) {
      res.status = RunStatus::degenerate;
      break;
    }
  }

  res.iterations = done;
  res.final_rse = rse;
  res.elapsed_seconds = seconds_since(t0);
  res.loop_mults = mults;
  res.x = DenseMatrix(n, 1, std::move(x));
  return res;
}

SolveResult run_rekdr_vector(const DenseMatrix& a, const std::vector<double>& b,
                             const SolverConfig& cfg) {
  if (b.size() != a.rows()) {
    throw std::invalid_argument("run_rekdr_vector: b length must equal rows of A");
  }
  DenseMatrix bm(a.rows(), 1, std::vector<double>(b));
  Problem problem = make_problem(a, std::move(bm), "vector-system");
  return run_rekdr(problem, cfg);
}

}  // namespace drek
