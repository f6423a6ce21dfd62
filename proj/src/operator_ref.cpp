#include "drek/operator_ref.hpp"

namespace drek {

DenseMatrix OperatorRef::gram_columns() const {
  const std::size_t n = cols();
  DenseMatrix g(n, n);
  for (std::size_t i = 0; i < rows(); ++i) {
    // Rank-1 accumulation over rows keeps the sparse path at sum(nnz_row^2).
    if (is_sparse()) {
      auto idx = sparse_->row_indices(i);
      auto val = sparse_->row_values(i);
      for (std::size_t a = 0; a < idx.size(); ++a) {
        double* grow = g.row_data(idx[a]);
        for (std::size_t b = 0; b < idx.size(); ++b) grow[idx[b]] += val[a] * val[b];
      }
    } else {
      const double* row = dense_->row_data(i);
      for (std::size_t a = 0; a < n; ++a) {
        const double va = row[a];
        if (va == 0.0) continue;
        double* grow = g.row_data(a);
        for (std::size_t b = 0; b < n; ++b) grow[b] += va * row[b];
      }
    }
  }
  return g;
}

DenseMatrix OperatorRef::gram_rows() const {
  const std::size_t m = rows();
  DenseMatrix h(m, m);
  for (std::size_t j = 0; j < cols(); ++j) {
    if (is_sparse()) {
      auto idx = sparse_->col_indices(j);
      auto val = sparse_->col_values(j);
      for (std::size_t a = 0; a < idx.size(); ++a) {
        double* hrow = h.row_data(idx[a]);
        for (std::size_t b = 0; b < idx.size(); ++b) hrow[idx[b]] += val[a] * val[b];
      }
    } else {
      for (std::size_t a = 0; a < m; ++a) {
        const double va = (*dense_)(a, j);
        if (va == 0.0) continue;
        double* hrow = h.row_data(a);
        for (std::size_t b = 0; b < m; ++b) hrow[b] += va * (*dense_)(b, j);
      }
    }
  }
  return h;
}

}  // namespace drek
