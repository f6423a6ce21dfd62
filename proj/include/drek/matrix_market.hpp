#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "drek/sparse_matrix.hpp"

namespace drek {

class MatrixMarketError : public std::runtime_error {
 public:
  MatrixMarketError(const std::string& path, std::size_t line, const std::string& message)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Coordinate-format reader. Accepts real, integer (read as real) and pattern
// fields with general or symmetric symmetry; symmetric files have their
// off-diagonal entries mirrored. Indices are 1-based in the file.
DualSparseMatrix load_matrix_market(const std::string& path);

// Writes coordinate real general, 1-based, row-major entry order.
void write_matrix_market(const std::string& path, const DualSparseMatrix& m,
                         const std::string& comment = "");

}  // namespace drek
