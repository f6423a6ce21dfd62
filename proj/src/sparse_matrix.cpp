#include "drek/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drek {

DualSparseMatrix::DualSparseMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<Triple> entries)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("DualSparseMatrix: empty shape");
  }
  for (const Triple& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw std::invalid_argument("DualSparseMatrix: entry (" + std::to_string(t.row) + "," +
                                  std::to_string(t.col) + ") out of bounds");
    }
    if (!std::isfinite(t.value)) {
      throw std::invalid_argument("DualSparseMatrix: non-finite value at (" +
                                  std::to_string(t.row) + "," + std::to_string(t.col) + ")");
    }
  }
  std::erase_if(entries, [](const Triple& t) { return t.value == 0.0; });
  std::sort(entries.begin(), entries.end(), [](const Triple& a, const Triple& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col) {
      throw std::invalid_argument("DualSparseMatrix: duplicate entry at (" +
                                  std::to_string(entries[k].row) + "," +
                                  std::to_string(entries[k].col) + ")");
    }
  }

  row_ptr_.assign(rows + 1, 0);
  col_ptr_.assign(cols + 1, 0);
  for (const Triple& t : entries) {
    ++row_ptr_[t.row + 1];
    ++col_ptr_[t.col + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_ptr_[i + 1] == 0) {
      throw std::invalid_argument("DualSparseMatrix: row " + std::to_string(i) + " is all zero");
    }
    row_ptr_[i + 1] += row_ptr_[i];
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_ptr_[j + 1] == 0) {
      throw std::invalid_argument("DualSparseMatrix: column " + std::to_string(j) +
                                  " is all zero");
    }
    col_ptr_[j + 1] += col_ptr_[j];
  }

  row_col_.resize(entries.size());
  row_val_.resize(entries.size());
  col_row_.resize(entries.size());
  col_val_.resize(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    row_col_[k] = entries[k].col;
    row_val_[k] = entries[k].value;
  }
  // Entries are row-major sorted, so filling columns in order keeps each
  // column's row indices ascending.
  std::vector<std::size_t> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
  for (const Triple& t : entries) {
    const std::size_t slot = cursor[t.col]++;
    col_row_[slot] = t.row;
    col_val_[slot] = t.value;
  }
}

DenseMatrix DualSparseMatrix::densify() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    auto idx = row_indices(i);
    auto val = row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) out(i, idx[k]) = val[k];
  }
  return out;
}

DenseMatrix DualSparseMatrix::densify_from_columns() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t j = 0; j < cols_; ++j) {
    auto idx = col_indices(j);
    auto val = col_values(j);
    for (std::size_t k = 0; k < idx.size(); ++k) out(idx[k], j) = val[k];
  }
  return out;
}

DualSparseMatrix DualSparseMatrix::transposed() const {
  std::vector<Triple> flipped;
  flipped.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    auto idx = row_indices(i);
    auto val = row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) flipped.push_back({idx[k], i, val[k]});
  }
  return DualSparseMatrix(cols_, rows_, std::move(flipped));
}

std::vector<Triple> DualSparseMatrix::triples() const {
  std::vector<Triple> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    auto idx = row_indices(i);
    auto val = row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) out.push_back({i, idx[k], val[k]});
  }
  return out;
}

DenseMatrix matmul(const DualSparseMatrix& a, const DenseMatrix& x) {
  if (a.cols() != x.rows()) {
    throw std::invalid_argument("matmul: inner dimensions disagree");
  }
  DenseMatrix out(a.rows(), x.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto idx = a.row_indices(i);
    auto val = a.row_values(i);
    double* orow = out.row_data(i);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double av = val[k];
      const double* xrow = x.row_data(idx[k]);
      for (std::size_t t = 0; t < x.cols(); ++t) orow[t] += av * xrow[t];
    }
  }
  return out;
}

DenseMatrix transpose_apply(const DualSparseMatrix& a, const DenseMatrix& z) {
  if (a.rows() != z.rows()) {
    throw std::invalid_argument("transpose_apply: row counts disagree");
  }
  DenseMatrix out(a.cols(), z.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto idx = a.col_indices(j);
    auto val = a.col_values(j);
    double* orow = out.row_data(j);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double av = val[k];
      const double* zrow = z.row_data(idx[k]);
      for (std::size_t t = 0; t < z.cols(); ++t) orow[t] += av * zrow[t];
    }
  }
  return out;
}

std::vector<double> row_sq_norms(const DualSparseMatrix& m) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (double v : m.row_values(i)) acc += v * v;
    out[i] = acc;
  }
  return out;
}

std::vector<double> col_sq_norms(const DualSparseMatrix& m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (double v : m.col_values(j)) acc += v * v;
    out[j] = acc;
  }
  return out;
}

double frobenius_norm_sq(const DualSparseMatrix& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (double v : m.row_values(i)) acc += v * v;
  }
  return acc;
}

}  // namespace drek
