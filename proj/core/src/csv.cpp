#include "amglab/csv.hpp"

#include <cstdio>
#include <fstream>

#include "amglab/errors.hpp"

namespace amglab {

CsvWriter::CsvWriter(std::vector<std::string> header) : ncols_(header.size()) {
  if (header.empty()) throw ConfigError("CsvWriter: empty header");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  body_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_) throw ConfigError("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("CsvWriter: cannot open " + path);
  out << body_;
  if (!out) throw ConfigError("CsvWriter: write failed for " + path);
}

void write_dense_csv(const DenseMatrix& A, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_dense_csv: cannot open " + path);
  char buf[40];
  for (index_t i = 0; i < A.nrows; ++i) {
    for (index_t j = 0; j < A.ncols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write_dense_csv: write failed for " + path);
}

}  // namespace amglab
