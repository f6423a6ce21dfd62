#pragma once

#include <cstddef>
#include <vector>

#include "drek/dense_matrix.hpp"
#include "drek/sparse_matrix.hpp"

namespace drek {

// Non-owning view over either matrix representation. The solver inner loops
// only ever touch one row or one column at a time; the dense/sparse branch
// sits outside the per-entry loop.
class OperatorRef {
 public:
  OperatorRef() = default;
  OperatorRef(const DenseMatrix& a) : dense_(&a) {}
  OperatorRef(const DualSparseMatrix& a) : sparse_(&a) {}

  bool valid() const { return dense_ != nullptr || sparse_ != nullptr; }
  bool is_sparse() const { return sparse_ != nullptr; }

  std::size_t rows() const { return dense_ ? dense_->rows() : sparse_->rows(); }
  std::size_t cols() const { return dense_ ? dense_->cols() : sparse_->cols(); }

  std::size_t row_nnz(std::size_t i) const {
    return dense_ ? dense_->cols() : sparse_->row_indices(i).size();
  }
  std::size_t col_nnz(std::size_t j) const {
    return dense_ ? dense_->rows() : sparse_->col_indices(j).size();
  }

  // f(column_index, value) over the stored entries of row i, ascending index.
  template <typename F>
  void for_row(std::size_t i, F&& f) const {
    if (dense_) {
      const double* row = dense_->row_data(i);
      for (std::size_t j = 0; j < dense_->cols(); ++j) f(j, row[j]);
    } else {
      auto idx = sparse_->row_indices(i);
      auto val = sparse_->row_values(i);
      for (std::size_t k = 0; k < idx.size(); ++k) f(idx[k], val[k]);
    }
  }

  // f(row_index, value) over the stored entries of column j, ascending index.
  template <typename F>
  void for_col(std::size_t j, F&& f) const {
    if (dense_) {
      for (std::size_t i = 0; i < dense_->rows(); ++i) f(i, (*dense_)(i, j));
    } else {
      auto idx = sparse_->col_indices(j);
      auto val = sparse_->col_values(j);
      for (std::size_t k = 0; k < idx.size(); ++k) f(idx[k], val[k]);
    }
  }

  DenseMatrix apply(const DenseMatrix& x) const {
    return dense_ ? matmul(*dense_, x) : matmul(*sparse_, x);
  }
  DenseMatrix apply_transpose(const DenseMatrix& z) const {
    return dense_ ? transpose_apply(*dense_, z) : transpose_apply(*sparse_, z);
  }

  std::vector<double> row_sq_norms() const {
    return dense_ ? drek::row_sq_norms(*dense_) : drek::row_sq_norms(*sparse_);
  }
  std::vector<double> col_sq_norms() const {
    return dense_ ? drek::col_sq_norms(*dense_) : drek::col_sq_norms(*sparse_);
  }
  double frobenius_norm_sq() const {
    return dense_ ? drek::frobenius_norm_sq(*dense_) : drek::frobenius_norm_sq(*sparse_);
  }

  DenseMatrix densify() const { return dense_ ? *dense_ : sparse_->densify(); }

  // A^T A and A A^T, returned dense; the incremental residual mode keys
  // its rank-1 updates off single columns of these.
  DenseMatrix gram_columns() const;
  DenseMatrix gram_rows() const;

 private:
  const DenseMatrix* dense_ = nullptr;
  const DualSparseMatrix* sparse_ = nullptr;
};

}  // namespace drek
