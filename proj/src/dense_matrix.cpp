#include "drek/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace drek {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("DenseMatrix: data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void DenseMatrix::require_finite(const char* what) const {
  if (!all_finite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

double frobenius_norm_sq(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return acc;
}

double frobenius_inner(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("frobenius_inner: shape mismatch");
  }
  double acc = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) acc += da[i] * db[i];
  return acc;
}

std::vector<double> row_sq_norms(const DenseMatrix& m) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row_data(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * row[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> col_sq_norms(const DenseMatrix& m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row_data(i);
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += row[j] * row[j];
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions disagree");
  }
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row_data(i);
    double* orow = out.row_data(i);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double alv = arow[l];
      if (alv == 0.0) continue;
      const double* brow = b.row_data(l);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += alv * brow[j];
    }
  }
  return out;
}

DenseMatrix transpose_apply(const DenseMatrix& a, const DenseMatrix& z) {
  if (a.rows() != z.rows()) {
    throw std::invalid_argument("transpose_apply: row counts disagree");
  }
  DenseMatrix out(a.cols(), z.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row_data(i);
    const double* zrow = z.row_data(i);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = arow[j];
      if (aij == 0.0) continue;
      double* orow = out.row_data(j);
      for (std::size_t t = 0; t < z.cols(); ++t) orow[t] += aij * zrow[t];
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("add: shape mismatch");
  }
  DenseMatrix out = a;
  auto o = out.mutable_data();
  auto db = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += db[i];
  return out;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("sub: shape mismatch");
  }
  DenseMatrix out = a;
  auto o = out.mutable_data();
  auto db = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= db[i];
  return out;
}

DenseMatrix scale(const DenseMatrix& a, double factor) {
  DenseMatrix out = a;
  for (double& v : out.mutable_data()) v *= factor;
  return out;
}

}  // namespace drek
