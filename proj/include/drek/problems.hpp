#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "drek/dense_matrix.hpp"
#include "drek/operator_ref.hpp"
#include "drek/rng.hpp"
#include "drek/sparse_matrix.hpp"
#include "drek/svd.hpp"

namespace drek {

struct ProblemMeta {
  std::string name;
  std::size_t m = 0, n = 0, p = 0;
  std::size_t rank = 0;
  double density = 1.0;  // nnz / (m*n); 1 for dense instances
  double mu = 0.0;       // noise level of the right-hand side
  std::uint64_t seed = 0;
  // Spectrum of A captured at construction: extremal nonzero eigenvalues of
  // A^T A and the squared Frobenius norm.
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double fro_norm_sq = 0.0;
  // Condition number over nonzero singular values, sigma_max / sigma_min.
  double cond = 0.0;
};

// A problem instance: the system AX = B with its minimal-norm least-squares
// solution and the range/orthogonal split of the right-hand side, all fixed
// at construction so solver runs and analyses share one ground truth.
struct Problem {
  std::variant<DenseMatrix, DualSparseMatrix> a;
  DenseMatrix b;
  DenseMatrix x_star;
  DenseMatrix b_hat;
  DenseMatrix b_perp;
  double xstar_norm_sq = 0.0;
  ProblemMeta meta;

  OperatorRef op() const {
    if (const auto* d = std::get_if<DenseMatrix>(&a)) return OperatorRef(*d);
    return OperatorRef(std::get<DualSparseMatrix>(a));
  }
  bool sparse() const { return std::holds_alternative<DualSparseMatrix>(a); }
};

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng);

// A = iid standard gaussian, B = A X_gen + mu * noise.
Problem gen_full_rank(std::size_t m, std::size_t n, std::size_t p, double mu,
                      std::uint64_t seed);

// Rank-deficient A = G H with G (m x rank) and H (rank x n) gaussian;
// realizes any target rank < min(m, n).
Problem gen_rank_deficient(std::size_t m, std::size_t n, std::size_t p, std::size_t rank,
                           double mu, std::uint64_t seed);

// Literal duplication construction: A = [A0, A0] with A0 = gaussian
// m x (n/2); n must be even. rank(A) = n/2 when A0 has full column rank.
Problem gen_duplicated_columns(std::size_t m, std::size_t n, std::size_t p, double mu,
                               std::uint64_t seed);

// Wraps an existing matrix with a generated right-hand side.
Problem build_problem_from_matrix(DualSparseMatrix a, std::size_t p, double mu,
                                  std::uint64_t seed, std::string name);
Problem build_problem_from_matrix(DenseMatrix a, std::size_t p, double mu, std::uint64_t seed,
                                  std::string name);

// Problem from an explicitly supplied right-hand side.
Problem make_problem(DenseMatrix a, DenseMatrix b, std::string name = "custom");
Problem make_problem(DualSparseMatrix a, DenseMatrix b, std::string name = "custom");

// Consistency checks on the stored decomposition; throws on violation.
void validate_problem(const Problem& problem);

}  // namespace drek
