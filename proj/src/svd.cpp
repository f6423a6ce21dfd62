#include "drek/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace drek {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kPairTolerance = 1e-14;

double column_dot(const DenseMatrix& w, std::size_t p, std::size_t q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.rows(); ++i) acc += w(i, p) * w(i, q);
  return acc;
}

// Factor a with rows >= cols. Returns (U m x n, sigma n, V n x n).
void jacobi_tall(const DenseMatrix& a, DenseMatrix& u, std::vector<double>& sigma,
                 DenseMatrix& v) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  DenseMatrix w = a;
  v = DenseMatrix::identity(n);

  bool converged = (n <= 1);
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double app = column_dot(w, p, p);
        const double aqq = column_dot(w, q, q);
        const double apq = column_dot(w, p, q);
        if (std::abs(apq) <= kPairTolerance * std::sqrt(app * aqq)) continue;
        converged = false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wip = w(i, p);
          const double wiq = w(i, q);
          w(i, p) = c * wip - s * wiq;
          w(i, q) = s * wip + c * wiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  if (!converged) {
    throw std::runtime_error("svd: Jacobi sweeps did not converge");
  }

  sigma.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(column_dot(w, j, j));

  // Sort non-increasing, carrying U and V columns along.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&sigma](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  u = DenseMatrix(m, n);
  DenseMatrix v_sorted(n, n);
  std::vector<double> sigma_sorted(n);
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t src = order[jj];
    sigma_sorted[jj] = sigma[src];
    if (sigma[src] > 0.0) {
      const double inv = 1.0 / sigma[src];
      for (std::size_t i = 0; i < m; ++i) u(i, jj) = w(i, src) * inv;
    }
    for (std::size_t i = 0; i < n; ++i) v_sorted(i, jj) = v(i, src);
  }
  sigma = std::move(sigma_sorted);
  v = std::move(v_sorted);
}

}  // namespace

std::size_t SvdFactors::numerical_rank() const {
  std::size_t r = 0;
  for (double s : sigma) {
    if (s > rank_tolerance) ++r;
  }
  return r;
}

double SvdFactors::lambda_max() const {
  if (numerical_rank() == 0) {
    throw std::domain_error("SvdFactors: zero matrix has no nonzero singular values");
  }
  return sigma.front() * sigma.front();
}

double SvdFactors::lambda_min() const {
  const std::size_t r = numerical_rank();
  if (r == 0) {
    throw std::domain_error("SvdFactors: zero matrix has no nonzero singular values");
  }
  return sigma[r - 1] * sigma[r - 1];
}

DenseMatrix SvdFactors::reconstruct() const {
  DenseMatrix scaled = u;
  for (std::size_t i = 0; i < scaled.rows(); ++i) {
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= sigma[j];
  }
  return matmul(scaled, transpose(v));
}

SvdFactors svd(const DenseMatrix& a, std::optional<double> rank_tolerance) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("svd: empty matrix");
  }
  if (rank_tolerance && *rank_tolerance < 0.0) {
    throw std::invalid_argument("svd: negative rank tolerance");
  }
  a.require_finite("svd");

  SvdFactors f;
  if (a.rows() >= a.cols()) {
    jacobi_tall(a, f.u, f.sigma, f.v);
  } else {
    // A = (A^T)^T: factor the transpose and swap the factor roles.
    DenseMatrix ut, vt;
    jacobi_tall(transpose(a), vt, f.sigma, ut);
    f.u = std::move(ut);
    f.v = std::move(vt);
  }
  const double sigma_max = f.sigma.empty() ? 0.0 : f.sigma.front();
  f.rank_tolerance =
      rank_tolerance.value_or(static_cast<double>(std::max(a.rows(), a.cols())) *
                              std::numeric_limits<double>::epsilon() * sigma_max);
  return f;
}

DenseMatrix pinv_solve(const SvdFactors& f, const DenseMatrix& b) {
  if (f.u.rows() != b.rows()) {
    throw std::invalid_argument("pinv_solve: row counts disagree");
  }
  DenseMatrix c = transpose_apply(f.u, b);  // k x p
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const double scale = f.sigma[i] > f.rank_tolerance ? 1.0 / f.sigma[i] : 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) *= scale;
  }
  return matmul(f.v, c);
}

DenseMatrix pinv_solve(const DenseMatrix& a, const DenseMatrix& b,
                       std::optional<double> rank_tolerance) {
  return pinv_solve(svd(a, rank_tolerance), b);
}

RangeSplit split_range(const DenseMatrix& a, const DenseMatrix& b,
                       std::optional<double> rank_tolerance) {
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("split_range: row counts disagree");
  }
  DenseMatrix x = pinv_solve(a, b, rank_tolerance);
  DenseMatrix b_hat = matmul(a, x);
  DenseMatrix b_perp = sub(b, b_hat);
  return {std::move(b_hat), std::move(b_perp)};
}

}  // namespace drek
