#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drek/dense_matrix.hpp"

namespace drek {

struct Triple {
  std::size_t row;
  std::size_t col;
  double value;
};

// One logical sparse matrix stored in both a row-access and a column-access
// form. The solvers sweep columns when updating Z and rows when updating X,
// so both directions have to be cheap.
//
// Construction validates the shape contract: entries in bounds, no
// duplicates, no stored zeros (dropped silently), and no all-zero row or
// column, since the projection steps divide by row and column norms.
class DualSparseMatrix {
 public:
  DualSparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triple> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return row_val_.size(); }
  double density() const {
    return static_cast<double>(nnz()) / (static_cast<double>(rows_) * static_cast<double>(cols_));
  }

  std::span<const std::size_t> row_indices(std::size_t i) const {
    return {row_col_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {row_val_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const std::size_t> col_indices(std::size_t j) const {
    return {col_row_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }
  std::span<const double> col_values(std::size_t j) const {
    return {col_val_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }

  DenseMatrix densify() const;
  DenseMatrix densify_from_columns() const;
  DualSparseMatrix transposed() const;
  // Entries sorted by (row, col).
  std::vector<Triple> triples() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_, row_col_;
  std::vector<double> row_val_;
  std::vector<std::size_t> col_ptr_, col_row_;
  std::vector<double> col_val_;
};

DenseMatrix matmul(const DualSparseMatrix& a, const DenseMatrix& x);
DenseMatrix transpose_apply(const DualSparseMatrix& a, const DenseMatrix& z);
std::vector<double> row_sq_norms(const DualSparseMatrix& m);
std::vector<double> col_sq_norms(const DualSparseMatrix& m);
double frobenius_norm_sq(const DualSparseMatrix& m);

}  // namespace drek
