#include "drek/problems.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace drek {

namespace {

// Substream roles within one problem seed.
enum : std::uint64_t { kStreamA = 0, kStreamX = 1, kStreamNoise = 2 };

DenseMatrix gaussian_rhs_noise(std::size_t m, std::size_t p, double mu, RngStream& rng) {
  DenseMatrix r(m, p);
  if (mu != 0.0) {
    for (double& v : r.mutable_data()) v = mu * rng.gaussian();
  }
  return r;
}

// Completes a Problem once A and B are fixed: reference solution, range
// split, spectrum metadata.
Problem finish_with_b(std::variant<DenseMatrix, DualSparseMatrix> a, DenseMatrix b, double mu,
                      std::uint64_t seed, std::string name) {
  Problem problem;
  problem.a = std::move(a);
  problem.b = std::move(b);
  const OperatorRef op = problem.op();
  const std::size_t m = op.rows();
  const std::size_t p = problem.b.cols();
  if (problem.b.rows() != m) {
    throw std::invalid_argument("Problem: A and B row counts disagree");
  }
  problem.b.require_finite("Problem B");

  const DenseMatrix dense_a = op.densify();
  const SvdFactors f = svd(dense_a);
  problem.x_star = pinv_solve(f, problem.b);
  problem.b_hat = op.apply(problem.x_star);
  problem.b_perp = sub(problem.b, problem.b_hat);
  problem.xstar_norm_sq = frobenius_norm_sq(problem.x_star);

  problem.meta.name = std::move(name);
  problem.meta.m = m;
  problem.meta.n = op.cols();
  problem.meta.p = p;
  problem.meta.mu = mu;
  problem.meta.seed = seed;
  problem.meta.rank = f.numerical_rank();
  problem.meta.density = 1.0;  // sparse callers overwrite with nnz/(m*n)
  problem.meta.lambda_min = f.lambda_min();
  problem.meta.lambda_max = f.lambda_max();
  problem.meta.fro_norm_sq = op.frobenius_norm_sq();
  problem.meta.cond = std::sqrt(f.lambda_max() / f.lambda_min());
  return problem;
}

// Builds B = A X_gen + mu * noise from the problem seed, then finishes.
Problem finish(std::variant<DenseMatrix, DualSparseMatrix> a, std::size_t p, double mu,
               std::uint64_t seed, std::string name) {
  OperatorRef op = std::holds_alternative<DenseMatrix>(a)
                       ? OperatorRef(std::get<DenseMatrix>(a))
                       : OperatorRef(std::get<DualSparseMatrix>(a));
  const std::size_t m = op.rows();
  const std::size_t n = op.cols();
  RngStream xs = RngStream::substream(seed, kStreamX);
  RngStream ns = RngStream::substream(seed, kStreamNoise);
  DenseMatrix x_gen = gaussian_matrix(n, p, xs);
  DenseMatrix noise = gaussian_rhs_noise(m, p, mu, ns);
  DenseMatrix b = add(op.apply(x_gen), noise);
  return finish_with_b(std::move(a), std::move(b), mu, seed, std::move(name));
}

}  // namespace

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
  DenseMatrix m(rows, cols);
  for (double& v : m.mutable_data()) v = rng.gaussian();
  return m;
}

Problem gen_full_rank(std::size_t m, std::size_t n, std::size_t p, double mu,
                      std::uint64_t seed) {
  if (m == 0 || n == 0 || p == 0) {
    throw std::invalid_argument("gen_full_rank: dimensions must be positive");
  }
  if (mu < 0.0) {
    throw std::invalid_argument("gen_full_rank: negative noise level");
  }
  RngStream as = RngStream::substream(seed, kStreamA);
  DenseMatrix a = gaussian_matrix(m, n, as);
  return finish(std::move(a), p, mu, seed, "full-rank");
}

Problem gen_rank_deficient(std::size_t m, std::size_t n, std::size_t p, std::size_t rank,
                           double mu, std::uint64_t seed) {
  if (rank == 0 || rank >= std::min(m, n)) {
    throw std::invalid_argument("gen_rank_deficient: rank must be in [1, min(m,n))");
  }
  RngStream as = RngStream::substream(seed, kStreamA);
  DenseMatrix g = gaussian_matrix(m, rank, as);
  DenseMatrix h = gaussian_matrix(rank, n, as);
  return finish(matmul(g, h), p, mu, seed, "rank-deficient");
}

Problem gen_duplicated_columns(std::size_t m, std::size_t n, std::size_t p, double mu,
                               std::uint64_t seed) {
  if (n == 0 || n % 2 != 0) {
    throw std::invalid_argument("gen_duplicated_columns: column count must be even");
  }
  RngStream as = RngStream::substream(seed, kStreamA);
  DenseMatrix half = gaussian_matrix(m, n / 2, as);
  DenseMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n / 2; ++j) {
      a(i, j) = half(i, j);
      a(i, j + n / 2) = half(i, j);
    }
  }
  return finish(std::move(a), p, mu, seed, "duplicated-columns");
}

Problem build_problem_from_matrix(DualSparseMatrix a, std::size_t p, double mu,
                                  std::uint64_t seed, std::string name) {
  if (p == 0) {
    throw std::invalid_argument("build_problem_from_matrix: p must be positive");
  }
  const double density = a.density();
  Problem problem = finish(std::move(a), p, mu, seed, std::move(name));
  problem.meta.density = density;
  return problem;
}

Problem build_problem_from_matrix(DenseMatrix a, std::size_t p, double mu, std::uint64_t seed,
                                  std::string name) {
  if (p == 0) {
    throw std::invalid_argument("build_problem_from_matrix: p must be positive");
  }
  a.require_finite("build_problem_from_matrix");
  return finish(std::move(a), p, mu, seed, std::move(name));
}

Problem make_problem(DenseMatrix a, DenseMatrix b, std::string name) {
  a.require_finite("make_problem");
  return finish_with_b(std::move(a), std::move(b), 0.0, 0, std::move(name));
}

Problem make_problem(DualSparseMatrix a, DenseMatrix b, std::string name) {
  const double density = a.density();
  Problem problem = finish_with_b(std::move(a), std::move(b), 0.0, 0, std::move(name));
  problem.meta.density = density;
  return problem;
}

void validate_problem(const Problem& problem) {
  const OperatorRef op = problem.op();
  const std::size_t m = op.rows();
  const std::size_t p = problem.meta.p;
  if (problem.b.rows() != m || problem.b.cols() != p) {
    throw std::invalid_argument("Problem: B shape mismatch");
  }
  problem.b.require_finite("Problem B");
  problem.x_star.require_finite("Problem X*");

  // B = B_hat + B_perp and A^T B_perp ~ 0.
  const DenseMatrix recomposed = add(problem.b_hat, problem.b_perp);
  const double recompose_err = frobenius_norm_sq(sub(recomposed, problem.b));
  const double b_scale = frobenius_norm_sq(problem.b);
  if (recompose_err > 1e-24 * std::max(b_scale, 1e-300)) {
    throw std::invalid_argument("Problem: B_hat + B_perp != B");
  }
  const double cross = frobenius_norm_sq(op.apply_transpose(problem.b_perp));
  const double a_scale = problem.meta.fro_norm_sq;
  if (cross > 1e-18 * a_scale * std::max(b_scale, 1e-300)) {
    throw std::invalid_argument("Problem: A^T B_perp is not negligible");
  }
}

}  // namespace drek
