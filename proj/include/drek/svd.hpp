#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "drek/dense_matrix.hpp"

namespace drek {

// Thin SVD A = U diag(sigma) V^T with k = min(m, n) columns.
// sigma is sorted non-increasing; columns of U belonging to zero singular
// values are zero vectors (they never contribute to a reconstruction or a
// pseudoinverse apply).
struct SvdFactors {
  DenseMatrix u;              // m x k
  std::vector<double> sigma;  // k, non-increasing, >= 0
  DenseMatrix v;              // n x k
  double rank_tolerance = 0.0;

  std::size_t numerical_rank() const;
  // Largest / smallest squared singular value above the rank tolerance.
  double lambda_max() const;
  double lambda_min() const;
  DenseMatrix reconstruct() const;
};

// One-sided Jacobi SVD: rotates column pairs of a working copy until all
// pairs are numerically orthogonal, never forming A^T A. Deterministic
// cyclic pair ordering. Throws std::runtime_error if the sweep limit is
// reached without convergence.
//
// rank_tolerance: singular values <= tolerance count as zero. Defaults to
// max(m, n) * machine-epsilon * sigma_max.
SvdFactors svd(const DenseMatrix& a, std::optional<double> rank_tolerance = std::nullopt);

// Minimal Frobenius-norm least-squares solution V Sigma^+ U^T B; every
// column of the result lies in range(A^T).
DenseMatrix pinv_solve(const DenseMatrix& a, const DenseMatrix& b,
                       std::optional<double> rank_tolerance = std::nullopt);
DenseMatrix pinv_solve(const SvdFactors& f, const DenseMatrix& b);

struct RangeSplit {
  DenseMatrix b_hat;   // component inside range(A)
  DenseMatrix b_perp;  // component orthogonal to range(A)
};

// B = B_hat + B_perp with B_hat = A pinv(A) B and A^T B_perp ~ 0.
RangeSplit split_range(const DenseMatrix& a, const DenseMatrix& b,
                       std::optional<double> rank_tolerance = std::nullopt);

}  // namespace drek
