#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drek {

// Row-major dense matrix of doubles. Value type: copyable, immutable by
// convention once handed to a solver (solvers own their working copies).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  // Contiguous row access.
  double* row_data(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_data(std::size_t i) const { return data_.data() + i * cols_; }
  std::span<const double> row_span(std::size_t i) const { return {row_data(i), cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }

  bool all_finite() const;
  // Throws std::invalid_argument when a NaN/Inf entry is present.
  void require_finite(const char* what) const;

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double frobenius_norm_sq(const DenseMatrix& m);
double frobenius_inner(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> row_sq_norms(const DenseMatrix& m);
std::vector<double> col_sq_norms(const DenseMatrix& m);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// A^T Z without forming the transpose.
DenseMatrix transpose_apply(const DenseMatrix& a, const DenseMatrix& z);
DenseMatrix transpose(const DenseMatrix& m);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, double factor);

}  // namespace drek
