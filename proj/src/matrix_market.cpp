#include "drek/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace drek {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct TaggedTriple {
  std::size_t row, col;
  double value;
  std::size_t line;
};

}  // namespace

DualSparseMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MatrixMarketError(path, 0, "cannot open file");
  }

  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) {
    throw MatrixMarketError(path, 1, "empty file");
  }
  ++lineno;
  std::istringstream banner(line);
  std::string magic, object, format, field, symmetry;
  banner >> magic >> object >> format >> field >> symmetry;
  if (magic != "%%MatrixMarket") {
    throw MatrixMarketError(path, lineno, "banner mismatch: expected %%MatrixMarket");
  }
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate") {
    throw MatrixMarketError(path, lineno, "unsupported header: only 'matrix coordinate' files");
  }
  const bool pattern = field == "pattern";
  if (field != "real" && field != "integer" && !pattern) {
    throw MatrixMarketError(path, lineno, "unsupported field type '" + field + "'");
  }
  const bool symmetric = symmetry == "symmetric";
  if (symmetry != "general" && !symmetric) {
    throw MatrixMarketError(path, lineno, "unsupported symmetry '" + symmetry + "'");
  }

  // Size line: first non-comment, non-blank line after the banner.
  std::size_t rows = 0, cols = 0, declared_nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) {
      throw MatrixMarketError(path, lineno, "missing size line");
    }
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    long long r = -1, c = -1, z = -1;
    if (!(ss >> r >> c >> z) || r <= 0 || c <= 0 || z < 0) {
      throw MatrixMarketError(path, lineno, "malformed size line '" + line + "'");
    }
    rows = static_cast<std::size_t>(r);
    cols = static_cast<std::size_t>(c);
    declared_nnz = static_cast<std::size_t>(z);
    break;
  }

  std::vector<TaggedTriple> entries;
  entries.reserve(symmetric ? 2 * declared_nnz : declared_nnz);
  std::size_t read = 0;
  while (read < declared_nnz) {
    if (!std::getline(in, line)) {
      throw MatrixMarketError(path, lineno,
                              "unexpected end of file: expected " +
                                  std::to_string(declared_nnz) + " entries, got " +
                                  std::to_string(read));
    }
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    double v = 1.0;
    if (!(ss >> i >> j)) {
      throw MatrixMarketError(path, lineno, "malformed entry '" + line + "'");
    }
    if (!pattern && !(ss >> v)) {
      throw MatrixMarketError(path, lineno, "missing value in entry '" + line + "'");
    }
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows ||
        static_cast<std::size_t>(j) > cols) {
      throw MatrixMarketError(path, lineno, "index (" + std::to_string(i) + "," +
                                                std::to_string(j) + ") outside " +
                                                std::to_string(rows) + "x" +
                                                std::to_string(cols));
    }
    ++read;
    const std::size_t r0 = static_cast<std::size_t>(i) - 1;
    const std::size_t c0 = static_cast<std::size_t>(j) - 1;
    entries.push_back({r0, c0, v, lineno});
    if (symmetric && r0 != c0) entries.push_back({c0, r0, v, lineno});
  }

  // Duplicate detection with line attribution before handing off.
  std::vector<TaggedTriple> sorted = entries;
  std::sort(sorted.begin(), sorted.end(), [](const TaggedTriple& a, const TaggedTriple& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k].row == sorted[k - 1].row && sorted[k].col == sorted[k - 1].col) {
      throw MatrixMarketError(path, sorted[k].line,
                              "duplicate entry (" + std::to_string(sorted[k].row + 1) + "," +
                                  std::to_string(sorted[k].col + 1) + ")");
    }
  }

  std::vector<Triple> triples;
  triples.reserve(entries.size());
  for (const TaggedTriple& t : entries) triples.push_back({t.row, t.col, t.value});
  try {
    return DualSparseMatrix(rows, cols, std::move(triples));
  } catch (const std::invalid_argument& e) {
    throw MatrixMarketError(path, lineno, e.what());
  }
}

void write_matrix_market(const std::string& path, const DualSparseMatrix& m,
                         const std::string& comment) {
  std::ofstream out(path);
  if (!out) {
    throw MatrixMarketError(path, 0, "cannot open file for writing");
  }
  out << "%%MatrixMarket matrix coordinate real general\n";
  if (!comment.empty()) out << "% " << comment << "\n";
  out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
  char buf[64];
  for (const Triple& t : m.triples()) {
    std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", t.row + 1, t.col + 1, t.value);
    out << buf;
  }
  if (!out) {
    throw MatrixMarketError(path, 0, "write failed");
  }
}

}  // namespace drek
